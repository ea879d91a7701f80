#!/usr/bin/env python3
"""
Convenience script to run the Stable Limit Lab CLI.

This script can be run from the repo directory regardless of what
the repo directory is named locally.

Usage:
    python run.py verify --config experiment.json --which main
    python run.py graph
    python run.py --help
"""

import sys
import types
from pathlib import Path

# Add the repo's parent directory to Python path, with the repo aliased as 'stable_limit_lab'
repo_dir = Path(__file__).parent.resolve()
sys.path.insert(0, str(repo_dir.parent))

if repo_dir.name != "stable_limit_lab":
    stable_limit_lab = types.ModuleType("stable_limit_lab")
    stable_limit_lab.__path__ = [str(repo_dir)]
    stable_limit_lab.__file__ = str(repo_dir / "__init__.py")
    sys.modules["stable_limit_lab"] = stable_limit_lab

from stable_limit_lab.cli import cli  # noqa: E402

if __name__ == "__main__":
    cli()

"""JSON schemas shipped with the lab."""

import json
from pathlib import Path
from typing import Any

SCHEMA_DIR = Path(__file__).parent


def load_schema(name: str) -> dict[str, Any]:
    """Load ``<name>.schema.json`` from this directory."""
    return json.loads((SCHEMA_DIR / f"{name}.schema.json").read_text())


EXPERIMENT_SCHEMA = load_schema("experiment")
SPECTRAL_MEASURE_SCHEMA = load_schema("spectral_measure")

"""
Graph nodes for the Stable Limit Lab pipeline.

Each node is one step of an experiment run.
"""

from .diagnose_conditions import diagnose_conditions_node
from .load_config import load_config_node
from .run_verification import run_verification_node
from .write_outputs import write_outputs_node

__all__ = [
    "load_config_node",
    "diagnose_conditions_node",
    "run_verification_node",
    "write_outputs_node",
]

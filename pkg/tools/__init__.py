"""Numerical tools for the Stable Limit Lab."""

from .output_saver import (
    get_run_output_dir,
    save_final_summary,
    save_manifest,
    save_messages_log,
    save_rows_csv,
)
from .rng import experiment_stream, make_stream
from .schema_validator import ensure_valid, parse_config_text, validate_against_schema

__all__ = [
    "experiment_stream",
    "make_stream",
    "ensure_valid",
    "parse_config_text",
    "validate_against_schema",
    "get_run_output_dir",
    "save_rows_csv",
    "save_manifest",
    "save_messages_log",
    "save_final_summary",
]

"""
JSON Schema validation tools.

Validates experiment configs and spectral-measure documents against the
schemas shipped in ``schemas/``. Diagnostics name the JSON path of every
problem and, when the source text is known, the line of the offending key.
"""

import json
import re
from typing import Any

from jsonschema import Draft7Validator

from ..exceptions import ConfigError


def locate_line(source_text: str, path: list[Any]) -> int | None:
    """
    Line (1-based) of the last key of ``path`` in ``source_text``.

    Keys are searched in order, each one after the line of the previous key,
    which is exact for the pretty-printed configs the lab reads and a good
    approximation otherwise. Array indices are skipped.
    """
    lines = source_text.splitlines()
    start = 0
    found: int | None = None
    for part in path:
        if not isinstance(part, str):
            continue
        pattern = re.compile(r'"' + re.escape(part) + r'"\s*:')
        for number in range(start, len(lines)):
            if pattern.search(lines[number]):
                found = number + 1
                start = number
                break
        else:
            return found
    return found


def validate_against_schema(
    data: Any,
    schema: dict[str, Any],
    source_text: str | None = None,
) -> tuple[bool, list[str]]:
    """
    Validate a document against a JSON schema.

    Args:
        data: The parsed JSON document
        schema: Draft 7 schema
        source_text: Raw JSON text, used to attach line numbers

    Returns:
        Tuple of (is_valid, list of error messages)
    """
    validator = Draft7Validator(schema)

    errors = []
    for error in sorted(validator.iter_errors(data), key=lambda e: [str(p) for p in e.absolute_path]):
        path = list(error.absolute_path)
        where = "$" + "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in path)
        line = locate_line(source_text, path) if source_text and path else None
        suffix = f" (line {line})" if line else ""
        errors.append(f"{where}{suffix}: {error.message}")

    return not errors, errors


def ensure_valid(data: Any, schema: dict[str, Any], source_text: str | None = None) -> None:
    """Raise :class:`ConfigError` carrying every diagnostic when ``data`` is invalid."""
    ok, errors = validate_against_schema(data, schema, source_text)
    if not ok:
        raise ConfigError(f"{len(errors)} schema violation(s)", diagnostics=errors)


def parse_config_text(source_text: str) -> dict[str, Any]:
    """Parse and schema-check an experiment config given as JSON text."""
    from ..schemas import EXPERIMENT_SCHEMA

    try:
        data = json.loads(source_text)
    except json.JSONDecodeError as e:
        raise ConfigError("invalid JSON", diagnostics=[f"line {e.lineno}: {e.msg}"]) from e

    ensure_valid(data, EXPERIMENT_SCHEMA, source_text)
    return data


def format_validation_report(label: str, errors: list[str]) -> str:
    """Format a validation report for a config."""
    lines = [f"## Validation Report: {label}\n"]

    if not errors:
        lines.append("✅ **VALID** - All checks passed\n")
        return "\n".join(lines)

    lines.append("❌ **INVALID** - Issues found:\n")
    for error in errors:
        lines.append(f"- {error}")
    lines.append("")
    return "\n".join(lines)

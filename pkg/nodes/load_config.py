"""
Node: Load Config

Read the experiment config, validate it against the JSON schema and build
the pydantic models every later step works with.
"""

import hashlib
import json
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from ..config import settings
from ..exceptions import ConfigError
from ..state import CoefficientFamily, ExperimentConfig, LabState, MAProcessSpec, StableParams, WorkflowStatus
from ..tools.process_gen import spec_from_family
from ..tools.schema_validator import parse_config_text


def config_hash(raw: dict[str, Any]) -> str:
    """sha256 of the canonical JSON text; stable under key reordering."""
    canonical = json.dumps(raw, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def build_experiment_config(raw: dict[str, Any]) -> ExperimentConfig:
    """
    Turn a schema-valid config dict into an :class:`ExperimentConfig`.

    Raises:
        ConfigError: when a model validator rejects a value
    """
    process = raw["process"]
    try:
        innovation = StableParams(**process["innovation"])
        if "family" in process:
            family = CoefficientFamily(**{"length": settings.family_length, **process["family"]})
            spec = spec_from_family(family, innovation)
        else:
            spec = MAProcessSpec(coeffs=process["coeffs"], innovation=innovation)
        fields = {key: value for key, value in raw.items() if key != "process"}
        return ExperimentConfig(spec=spec, **fields)
    except ValidationError as e:
        diagnostics = [
            "$." + ".".join(str(p) for p in err["loc"]) + f": {err['msg']}" if err["loc"] else err["msg"]
            for err in e.errors()
        ]
        raise ConfigError("config values rejected", diagnostics=diagnostics) from e


def load_experiment_config(
    config_path: str | Path, seed_override: int | None = None
) -> tuple[dict[str, Any], ExperimentConfig, str]:
    """Read, validate and hash a config file; returns (raw, config, hash)."""
    try:
        text = Path(config_path).read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config {config_path}", diagnostics=[str(e)]) from e
    raw = parse_config_text(text)
    if seed_override is not None:
        raw = {**raw, "master_seed": seed_override}
    return raw, build_experiment_config(raw), config_hash(raw)


def load_config_node(state: LabState) -> dict:
    """
    Load and validate the experiment config.

    This node:
    1. Parses the JSON text and checks it against the experiment schema
    2. Applies the seed override
    3. Builds the process spec and experiment config models
    4. Records the config hash used in every output
    """
    messages = list(state.messages)
    messages.append(f"Loading config {state.config_path}...")

    try:
        raw, config, digest = load_experiment_config(state.config_path, state.seed_override)
    except ConfigError as e:
        messages.append(f"Config rejected: {e}")
        for line in e.diagnostics:
            messages.append(f"  - {line}")
        return {
            "status": WorkflowStatus.FAILED,
            "error_kind": "config",
            "error_message": "\n".join([str(e), *e.diagnostics]),
            "messages": messages,
        }

    spec = config.spec
    messages.append(
        f"Process: q={spec.memory}, alpha={spec.alpha}, beta={spec.innovation.beta}, "
        f"seed={config.master_seed}, hash={digest[:12]}"
    )
    return {
        "raw_config": raw,
        "config": config,
        "config_hash": digest,
        "messages": messages,
    }

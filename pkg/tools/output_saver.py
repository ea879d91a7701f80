"""
Utility for saving run outputs.

Every run gets its own directory holding the report CSVs, SVG figures,
``manifest.json``, ``workflow_log.txt`` and ``SUMMARY.md``. CSVs start with
``# config_hash`` / ``# seed`` comment lines and write floats with repr
precision, so identical runs produce identical bytes.
"""

import csv
import json
from datetime import datetime
from enum import Enum
from pathlib import Path
from typing import Any, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from pydantic import BaseModel  # noqa: E402

from ..config import get_output_path  # noqa: E402
from ..state import RunManifest  # noqa: E402

SVG_HASH_SALT = "stable-limit-lab"


def sanitize_for_filename(name: str) -> str:
    """Sanitize a string for use in file/directory names."""
    sanitized = name.replace("/", "-").replace("\\", "-").replace(" ", "_")
    while "--" in sanitized:
        sanitized = sanitized.replace("--", "-")
    return sanitized.strip(" -_")


def get_run_output_dir(experiment: str, out_dir: str | Path | None = None) -> Path:
    """
    Get the output directory for a run.

    An explicit ``out_dir`` is used as is; otherwise a timestamped directory
    output/{experiment}_{timestamp}/ is created under settings.output_dir.
    """
    if out_dir is not None:
        output_dir = Path(out_dir)
    else:
        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        output_dir = get_output_path(f"{sanitize_for_filename(experiment)}_{timestamp}")
    output_dir.mkdir(parents=True, exist_ok=True)
    return output_dir


# -----------------------------------------------------------------------------
# CSV
# -----------------------------------------------------------------------------


def format_cell(value: Any) -> str:
    """CSV cell text: repr for floats, lowercase booleans, enum values, empty for None."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def flatten_row(row: BaseModel | dict[str, Any], prefix: str = "") -> dict[str, Any]:
    """Nested models and dicts become ``parent_child`` columns."""
    data = row.model_dump() if isinstance(row, BaseModel) else dict(row)
    flat: dict[str, Any] = {}
    for key, value in data.items():
        name = f"{prefix}{key}"
        if isinstance(value, BaseModel):
            value = value.model_dump()
        if isinstance(value, dict):
            flat.update(flatten_row(value, prefix=f"{name}_"))
        else:
            flat[name] = value
    return flat


def save_rows_csv(
    output_dir: Path,
    name: str,
    rows: Sequence[BaseModel | dict[str, Any]],
    header: dict[str, Any],
    columns: Sequence[str] | None = None,
) -> Path:
    """
    Save report rows as CSV.

    Args:
        output_dir: Run directory
        name: File stem
        rows: Pydantic rows or dicts (nested values are flattened)
        header: Comment lines written first as ``# key: value``
        columns: Column order; defaults to the keys of the first row

    Returns:
        Path to the saved file
    """
    flat = [flatten_row(row) for row in rows]
    if columns is None:
        columns = list(flat[0]) if flat else []
        for row in flat[1:]:
            columns += [key for key in row if key not in columns]

    filepath = output_dir / f"{name}.csv"
    with open(filepath, "w", newline="") as f:
        for key, value in header.items():
            f.write(f"# {key}: {format_cell(value)}\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for row in flat:
            writer.writerow([format_cell(row.get(column)) for column in columns])
    return filepath


def read_csv_header(filepath: Path) -> dict[str, str]:
    """The ``# key: value`` comment lines at the top of a CSV."""
    header = {}
    with open(filepath) as f:
        for line in f:
            if not line.startswith("#"):
                break
            key, _, value = line[1:].partition(":")
            header[key.strip()] = value.strip()
    return header


# -----------------------------------------------------------------------------
# SVG
# -----------------------------------------------------------------------------


def _save_svg(fig: Any, filepath: Path, reproducible: bool) -> Path:
    metadata = {"Date": None} if reproducible else {}
    with plt.rc_context({"svg.hashsalt": SVG_HASH_SALT}):
        fig.savefig(filepath, format="svg", metadata=metadata)
    plt.close(fig)
    return filepath


def save_line_plot(
    output_dir: Path,
    name: str,
    x: Sequence[float],
    series: dict[str, Sequence[float]],
    xlabel: str,
    ylabel: str,
    log_x: bool = False,
    log_y: bool = False,
    reproducible: bool = False,
) -> Path:
    """One or more line series against a common x-axis."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, values in series.items():
        ax.plot(x, values, marker="o", label=label)
    if log_x:
        ax.set_xscale("log")
    if log_y:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.legend()
    fig.tight_layout()
    return _save_svg(fig, output_dir / f"{name}.svg", reproducible)


def save_ecdf_plot(
    output_dir: Path,
    name: str,
    samples: Sequence[float],
    reference: tuple[Sequence[float], Sequence[float]] | None = None,
    xlabel: str = "x",
    reproducible: bool = False,
) -> Path:
    """Empirical CDF of ``samples``, optionally against a reference CDF given as (x, F(x))."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.ecdf(samples, label="empirical")
    if reference is not None:
        ax.plot(reference[0], reference[1], label="reference")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("F(x)")
    ax.legend()
    fig.tight_layout()
    return _save_svg(fig, output_dir / f"{name}.svg", reproducible)


# -----------------------------------------------------------------------------
# Manifest, log and summary
# -----------------------------------------------------------------------------


def save_step_output(output_dir: Path, step_name: str, data: Any) -> Path:
    """Save a model, list of models or plain data as pretty JSON."""
    filepath = output_dir / f"{step_name}.json"

    if isinstance(data, BaseModel):
        json_data = data.model_dump(mode="json")
    elif isinstance(data, list) and data and isinstance(data[0], BaseModel):
        json_data = [item.model_dump(mode="json") for item in data]
    else:
        json_data = data

    with open(filepath, "w") as f:
        json.dump(json_data, f, indent=2, sort_keys=True, default=str)

    return filepath


def save_manifest(output_dir: Path, manifest: RunManifest) -> Path:
    return save_step_output(output_dir, "manifest", manifest)


def save_messages_log(output_dir: Path, messages: list[str]) -> Path:
    """Save the workflow messages log."""
    filepath = output_dir / "workflow_log.txt"

    with open(filepath, "w") as f:
        for i, msg in enumerate(messages, 1):
            f.write(f"[{i:03d}] {msg}\n")

    return filepath


def save_final_summary(output_dir: Path, state: Any) -> Path:
    """
    Save a final summary of the run.

    Creates a markdown summary with status, reproducibility keys and the
    list of files written.
    """
    filepath = output_dir / "SUMMARY.md"

    def get_value(val):
        return val.value if hasattr(val, "value") else val

    status = get_value(state.status)
    status_emoji = "✅" if status == "completed" else "❌" if status == "failed" else "⚠️"

    lines = [
        f"# Run Summary: {get_value(state.experiment)}",
        "",
        f"**Config:** `{state.config_path}`",
        f"**Config hash:** `{state.config_hash}`",
        f"**Master seed:** {state.config.master_seed if state.config else 'n/a'}",
        f"**Status:** {status_emoji} {status.upper()}",
        "",
    ]
    if not state.reproducible:
        lines.insert(2, f"**Run date:** {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")

    if state.error_message:
        lines.extend(["## Error", "", f"```\n{state.error_message}\n```", ""])

    verdicts = []
    if state.condition_report is not None:
        verdicts.append(("summability condition", get_value(state.condition_report.verdict)))
    if state.rv_check is not None:
        verdicts.append(("regular-variation exponent", get_value(state.rv_check.verdict)))
    if state.hoeffding_rows:
        held = all(r.within_envelope for r in state.hoeffding_rows)
        verdicts.append(("Hoeffding identity", "pass" if held else "fail"))
    if state.alpha1_report is not None:
        verdicts.append(("alpha = 1 identity", get_value(state.alpha1_report.verdict)))
    if state.tangent_table is not None:
        verdicts.append(("tangent gaps monotone", "pass" if state.tangent_table.monotone else "fail"))
    if state.newman_reports:
        held = all(r.holds for r in state.newman_reports)
        verdicts.append(("Newman inequality", "pass" if held else "fail"))
    if verdicts:
        lines.extend(["## Verdicts", "", "| Check | Verdict |", "|-------|---------|"])
        lines.extend(f"| {check} | {verdict} |" for check, verdict in verdicts)
        lines.append("")

    if state.outputs:
        lines.extend(["## Files", ""])
        lines.extend(f"- `{Path(p).name}`" for p in state.outputs)
        lines.append("")

    filepath.write_text("\n".join(lines))
    return filepath

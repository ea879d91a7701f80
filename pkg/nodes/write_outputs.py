"""
Node: Write Outputs

Write the report CSVs and SVG figures of the run. The manifest, log and
summary are written by the runner after the graph finishes.
"""

from pathlib import Path

from ..state import Experiment, LabState
from ..tools.limit_lab import battery_specs
from ..tools.output_saver import get_run_output_dir, save_line_plot, save_rows_csv
from ..tools.tail_diagnostics import closed_form_curve


def _verdict(value) -> str:
    return value.value if hasattr(value, "value") else str(value)


def write_report_files(state: LabState, output_dir: Path) -> list[Path]:
    """Write every report present in ``state``; returns the files written."""
    header = {"config_hash": state.config_hash, "seed": state.config.master_seed}
    reproducible = state.reproducible
    spec = state.config.spec
    files: list[Path] = []

    report = state.condition_report
    if report is not None:
        verdict = _verdict(report.verdict)
        rows = [
            {"n": r.n, "b_n": r.b_n, "lhs": r.lhs, "rhs": report.rhs_limit, "se": r.se, "verdict": verdict}
            for r in report.lhs_sequence
        ] or [{"n": None, "b_n": None, "lhs": None, "rhs": report.rhs_limit, "se": None, "verdict": verdict}]
        files.append(save_rows_csv(output_dir, "condition_report", rows, header))
        if report.per_lag:
            files.append(save_rows_csv(output_dir, "condition_lags", report.per_lag, header))
        if report.uniformity:
            files.append(save_rows_csv(output_dir, "condition_uniformity", report.uniformity, header))

    curve = state.curve
    if curve is not None:
        closed = closed_form_curve(spec, curve.a_grid)
        se = curve.standard_errors or [None] * len(curve.a_grid)
        rows = [
            {"a": a, "mc": v, "se": s, "closed_form": c}
            for a, v, s, c in zip(curve.a_grid, curve.values, se, closed.values)
        ]
        files.append(save_rows_csv(output_dir, "trunc_cov_curve", rows, header))
        if all(v > 0 for v in curve.values + closed.values):
            files.append(
                save_line_plot(
                    output_dir, "trunc_cov_curve", curve.a_grid,
                    {"Monte Carlo (raw)": curve.values, "closed form (normalized)": closed.values},
                    "a", "sum of truncated covariances", log_x=True, log_y=True, reproducible=reproducible,
                )
            )
    if state.rv_check is not None:
        files.append(save_rows_csv(output_dir, "rv_exponent", [state.rv_check], header))
    if state.single_lag_table is not None:
        table = state.single_lag_table
        rows = [{"lag": table.lag, "a": table.a, **r.model_dump()} for r in table.rows]
        files.append(save_rows_csv(output_dir, "single_lag", rows, header))
    if state.hoeffding_rows:
        files.append(save_rows_csv(output_dir, "hoeffding_identity", state.hoeffding_rows, header))
    if state.spectral_condition is not None:
        spectral = state.spectral_condition
        rows = [{"lag": r, "value": v} for r, v in enumerate(spectral.per_lag, start=1)]
        rows.append({"lag": "total", "value": spectral.value, "diverging": spectral.diverging})
        files.append(save_rows_csv(output_dir, "spectral_condition", rows, header))

    if state.convergence_report is not None:
        conv = state.convergence_report
        files.append(save_rows_csv(output_dir, "convergence", conv.rows, header))
        n = [r.n for r in conv.rows]
        files.append(
            save_line_plot(
                output_dir, "convergence", n,
                {"KS": [r.ks for r in conv.rows], "KS noise floor": [r.ks_noise_floor for r in conv.rows]},
                "n", "distance to the limit law", log_x=True, reproducible=reproducible,
            )
        )
    if state.split_table is not None:
        files.append(save_rows_csv(output_dir, "truncation_split", state.split_table.rows, header))

    if state.alpha1_report is not None:
        verdict = _verdict(state.alpha1_report.verdict)
        rows = [{**r.model_dump(), "verdict": verdict} for r in state.alpha1_report.rows]
        files.append(save_rows_csv(output_dir, "alpha1_identity", rows, header))

    if state.tangent_table is not None:
        table = state.tangent_table
        files.append(save_rows_csv(output_dir, "tangent", table.rows, header))
        gaps = [r.gap for r in table.rows]
        files.append(
            save_line_plot(
                output_dir, "tangent", [r.N for r in table.rows], {"CF gap": gaps},
                "N", "sup CF gap", log_x=True, log_y=all(g > 0 for g in gaps), reproducible=reproducible,
            )
        )

    if state.functional_report is not None:
        func = state.functional_report
        rows = [{**r.model_dump(), "oracle_grid_bias": func.oracle_grid_bias} for r in func.rows]
        files.append(save_rows_csv(output_dir, "functional", rows, header))
        files.append(
            save_line_plot(
                output_dir, "functional", [r.n for r in func.rows],
                {
                    "sup KS": [r.sup_ks for r in func.rows],
                    "factorization gap": [r.factorization_gap for r in func.rows],
                },
                "n", "distance", log_x=True, reproducible=reproducible,
            )
        )

    if state.newman_reports:
        if state.config.newman.battery:
            labels = [
                {"coeffs": " ".join(repr(c) for c in s.coeffs), "alpha": s.alpha, "beta": s.innovation.beta}
                for s in battery_specs()
            ]
        else:
            labels = [{"coeffs": " ".join(repr(c) for c in spec.coeffs), "alpha": spec.alpha, "beta": spec.innovation.beta}]
        rows = [{**label, **r.model_dump()} for label, r in zip(labels, state.newman_reports)]
        files.append(save_rows_csv(output_dir, "newman", rows, header))

    return files


def write_outputs_node(state: LabState) -> dict:
    """
    Persist the results of the run.

    This node:
    1. Resolves the run directory (--out-dir or a timestamped default)
    2. Writes one CSV per report, plus SVG line plots
    """
    messages = list(state.messages)
    experiment = Experiment(state.experiment).value
    output_dir = get_run_output_dir(experiment, state.out_dir)

    files: list[Path] = []
    if state.config is not None:
        files = write_report_files(state, output_dir)
    messages.append(f"Wrote {len(files)} report file(s) to {output_dir}")

    return {
        "out_dir": str(output_dir),
        "outputs": [str(p) for p in files],
        "messages": messages,
    }

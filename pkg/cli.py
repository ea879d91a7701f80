"""
CLI entry point for the Stable Limit Lab.

Usage:
    stable-lab simulate --config experiment.json --out-dir runs/sim
    stable-lab diagnose --config experiment.json --workers 8
    stable-lab verify --config experiment.json --which main --reproducible
    stable-lab m1-dist x.csv y.csv
    stable-lab graph
"""

import sys
from pathlib import Path

import click
import numpy as np
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from .config import __version__, settings, validate_settings
from .exceptions import ConfigError, LabError, NumericError
from .graph import run_experiment
from .nodes.load_config import load_experiment_config
from .state import Experiment, LabState, RunManifest, WorkflowStatus
from .tools.mpath import distances, path_from_csv
from .tools.output_saver import (
    get_run_output_dir,
    save_ecdf_plot,
    save_manifest,
    save_rows_csv,
)
from .tools.process_gen import marginal_params, simulate_path
from .tools.rng import experiment_stream
from .tools.schema_validator import format_validation_report
from .tools.stable_core import cdf_stable

console = Console()

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERIC = 2
ECDF_REFERENCE_POINTS = 64


def exit_code_for(state: LabState) -> int:
    """0 for completed runs (whatever the verdicts), 1 for usage/config errors, 2 for numeric failures."""
    status = state.status.value if hasattr(state.status, "value") else state.status
    if status == WorkflowStatus.COMPLETED.value:
        return EXIT_OK
    if state.error_kind == "numeric":
        return EXIT_NUMERIC
    return EXIT_USAGE


def common_options(func):
    """Options shared by every experiment command."""
    options = [
        click.option("--config", "config_path", required=True, type=click.Path(dir_okay=False), help="JSON experiment config"),
        click.option("--seed", type=int, default=None, help="Override the config's master_seed"),
        click.option("--workers", type=int, default=None, help="Worker threads (results do not depend on it)"),
        click.option("--out-dir", default=None, help="Run directory (default: timestamped under output/)"),
        click.option("--reproducible", is_flag=True, help="Suppress timestamps in SVGs, summary and manifest"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _prepare(workers: int | None) -> int:
    """Validate settings and apply the worker override; returns the worker count."""
    if workers is not None:
        settings.workers = workers
    errors = validate_settings()
    if errors:
        console.print("[red]Configuration errors:[/red]")
        for error in errors:
            console.print(f"  - {error}")
        sys.exit(EXIT_USAGE)
    return settings.workers


def _report_config_error(label: str, error: ConfigError) -> None:
    console.print(f"[red]Config error:[/red] {error}")
    console.print(format_validation_report(label, error.diagnostics), highlight=False)


def _run_pipeline(
    config_path: str,
    experiment: Experiment,
    seed: int | None,
    workers: int | None,
    out_dir: str | None,
    reproducible: bool,
) -> None:
    n_workers = _prepare(workers)
    console.print(Panel.fit(
        f"[bold]Stable Limit Lab[/bold] {__version__}\n\n"
        f"Experiment: {experiment.value}\n"
        f"Config: {config_path}\n"
        f"Seed override: {seed if seed is not None else '-'}\n"
        f"Workers: {n_workers}",
        title="Configuration",
    ))

    try:
        final_state = run_experiment(
            config_path=config_path,
            experiment=experiment,
            seed_override=seed,
            workers=n_workers,
            out_dir=out_dir,
            reproducible=reproducible,
        )
    except KeyboardInterrupt:
        console.print("\n[yellow]Run cancelled by user[/yellow]")
        sys.exit(EXIT_USAGE)
    except NumericError as e:
        console.print(f"\n[red]Numeric failure: {e}[/red]")
        sys.exit(EXIT_NUMERIC)
    except LabError as e:
        console.print(f"\n[red]Error: {e}[/red]")
        sys.exit(EXIT_USAGE)

    if final_state.error_kind == "config":
        console.print(f"[red]Config error[/red] in {config_path}:")
        console.print(final_state.error_message or "", highlight=False)
    show_results(final_state)
    sys.exit(exit_code_for(final_state))


def show_results(state: LabState) -> None:
    """Display the results of the run."""
    table = Table(title="Results Summary", show_header=True)
    table.add_column("Metric", style="bold")
    table.add_column("Value")

    if state.lag_sum is not None:
        table.add_row("Closed-form lag sum", f"{state.lag_sum.value:.6g}" + (" (diverging)" if state.lag_sum.diverging else ""))
    if state.condition_report is not None:
        table.add_row("Condition verdict", state.condition_report.verdict.value)
    if state.rv_check is not None:
        table.add_row("RV slope", f"{state.rv_check.slope:.4f} (expected {state.rv_check.expected:.4f})")
    if state.single_lag_table is not None:
        last = state.single_lag_table.rows[-1]
        table.add_row(f"Lag-1 relative gap at n={last.n}", f"{last.rel_gap:.3f}")
    if state.spectral_condition is not None:
        table.add_row("Spectral covariance sum", f"{state.spectral_condition.value:.6g}")
    if state.convergence_report is not None:
        for row in state.convergence_report.rows:
            table.add_row(f"KS at n={row.n}", f"{row.ks:.4f} (floor {row.ks_noise_floor:.4f})")
    if state.alpha1_report is not None:
        table.add_row("alpha = 1 identity", state.alpha1_report.verdict.value)
    if state.tangent_table is not None:
        last = state.tangent_table.rows[-1]
        table.add_row(f"Tangent gap at N={last.N}", f"{last.gap:.3e}")
    if state.functional_report is not None:
        for row in state.functional_report.rows:
            table.add_row(f"sup KS at n={row.n}", f"{row.sup_ks:.4f}")
    if state.newman_reports:
        held = sum(r.holds for r in state.newman_reports)
        table.add_row("Newman inequality", f"held {held}/{len(state.newman_reports)}")

    status_value = state.status.value if hasattr(state.status, "value") else state.status
    status_color = "green" if status_value == "completed" else "yellow"
    table.add_row("Final Status", f"[{status_color}]{status_value}[/{status_color}]")
    console.print(table)

    if state.error_message and state.error_kind != "config":
        console.print(f"\n[red]{state.error_message}[/red]")
    if state.out_dir:
        console.print(f"\n[bold]Output directory:[/bold] {state.out_dir}")


# -----------------------------------------------------------------------------
# Commands
# -----------------------------------------------------------------------------


@click.command()
@common_options
def simulate(config_path: str, seed: int | None, workers: int | None, out_dir: str | None, reproducible: bool):
    """Simulate one path X_1..X_n of the configured process and write it as CSV."""
    _prepare(workers)
    try:
        _, config, digest = load_experiment_config(config_path, seed)
    except ConfigError as e:
        _report_config_error(config_path, e)
        sys.exit(EXIT_USAGE)

    n = config.simulate.n
    samples = simulate_path(config.spec, n, experiment_stream(config.master_seed, "simulate"))
    output_dir = get_run_output_dir("simulate", out_dir)
    header = {"config_hash": digest, "seed": config.master_seed}
    files = [
        save_rows_csv(output_dir, "samples", [{"j": j + 1, "x": float(x)} for j, x in enumerate(samples)], header)
    ]

    marginal = marginal_params(config.spec)
    knots = np.quantile(samples, np.linspace(0.01, 0.99, ECDF_REFERENCE_POINTS))
    reference = (knots, [cdf_stable(marginal, float(k)) for k in knots])
    files.append(save_ecdf_plot(output_dir, "samples_ecdf", samples, reference, "x", reproducible=reproducible))

    manifest = RunManifest(
        experiment="simulate",
        config_hash=digest,
        master_seed=config.master_seed,
        tool_version=__version__,
        workers=settings.workers,
        outputs=[p.name for p in files] + ["manifest.json"],
    )
    save_manifest(output_dir, manifest)
    console.print(f"Wrote {n} samples to {files[0]}")


@click.command()
@common_options
def diagnose(config_path: str, seed: int | None, workers: int | None, out_dir: str | None, reproducible: bool):
    """Diagnose the summability condition (exit code 0 for pass and fail verdicts)."""
    _run_pipeline(config_path, Experiment.DIAGNOSE, seed, workers, out_dir, reproducible)


@click.command()
@common_options
@click.option(
    "--which",
    type=click.Choice(["main", "alpha1", "tangent", "functional", "newman"]),
    default="main",
    show_default=True,
    help="Verification to run",
)
def verify(
    config_path: str, seed: int | None, workers: int | None, out_dir: str | None, reproducible: bool, which: str
):
    """Verify the limit theorem numerically."""
    _run_pipeline(config_path, Experiment(which), seed, workers, out_dir, reproducible)


@click.command(name="m1-dist")
@click.argument("path_x", type=click.Path(exists=True, dir_okay=False))
@click.argument("path_y", type=click.Path(exists=True, dir_okay=False))
@click.option("--tol", type=float, default=None, help="Refinement tolerance (default: settings.m1_tol)")
@click.option("--out-dir", default=None, help="Also write distances.csv into this directory")
def m1_dist(path_x: str, path_y: str, tol: float | None, out_dir: str | None):
    """M1, J1 and uniform distances between two path CSVs (time,value rows)."""
    try:
        x, y = path_from_csv(Path(path_x)), path_from_csv(Path(path_y))
    except (ValueError, KeyError) as e:
        console.print(f"[red]Cannot read path: {e}[/red]")
        sys.exit(EXIT_USAGE)
    try:
        report = distances(x, y, tol)
    except NumericError as e:
        best = f"; best estimate {e.best!r}" if e.best is not None else ""
        console.print(f"[red]Numeric failure: {e}{best}[/red]")
        sys.exit(EXIT_NUMERIC)

    table = Table(title="Path distances", show_header=True)
    table.add_column("Metric", style="bold")
    table.add_column("Value")
    table.add_row("M1", repr(report.m1))
    table.add_row("J1", repr(report.j1))
    table.add_row("uniform", repr(report.uniform))
    console.print(table)

    if out_dir:
        output_dir = get_run_output_dir("m1-dist", out_dir)
        save_rows_csv(output_dir, "distances", [report], {"path_x": path_x, "path_y": path_y})


@click.command()
def show_graph():
    """Display the pipeline graph structure."""
    from .graph import get_graph_visualization

    console.print("[bold]Pipeline Graph (Mermaid format):[/bold]\n")
    console.print(get_graph_visualization(), highlight=False, markup=False)


@click.group()
@click.version_option(__version__, prog_name="stable-lab")
def cli():
    """Stable Limit Lab - numerical verification of stable limit theorems for associated sequences."""
    pass


cli.add_command(simulate, name="simulate")
cli.add_command(diagnose, name="diagnose")
cli.add_command(verify, name="verify")
cli.add_command(m1_dist, name="m1-dist")
cli.add_command(show_graph, name="graph")


if __name__ == "__main__":
    cli()

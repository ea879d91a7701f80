"""
Node: Run Verification

Dispatch the configured experiment to the limit laboratory or the path
module and store its report in the state.
"""

from ..exceptions import ContractError, LabError, NumericError, ParameterDomainError, UsageError
from ..state import Experiment, LabState, WorkflowStatus
from ..tools.limit_lab import (
    newman_battery,
    newman_gap_check,
    truncation_split_check,
    verify_alpha1_identity,
    verify_main,
    verify_tangent_convergence,
)
from ..tools.mpath import verify_functional
from ..tools.rng import experiment_stream
from ..tools.tail_diagnostics import (
    default_a_grid,
    hoeffding_identity_check,
    mc_trunc_cov_curve,
    rv_exponent_check,
    single_lag_limit_check,
    spectral_covariance_condition,
)

HOEFFDING_LEVELS = (0.5, 1.0, 2.0)


def _run(state: LabState, messages: list[str]) -> dict:
    config = state.config
    spec = config.spec
    seed = config.master_seed
    experiment = Experiment(state.experiment)

    if experiment == Experiment.DIAGNOSE:
        section = config.diagnose
        a_grid = default_a_grid(spec) if section.a_grid is None else section.a_grid
        curve = mc_trunc_cov_curve(spec, a_grid, section.reps, experiment_stream(seed, "curve"))
        messages.append(f"Truncated covariance curve on {len(curve.a_grid)} truncation levels")
        update: dict = {"curve": curve}
        try:
            check = rv_exponent_check(curve, spec.alpha)
            messages.append(f"Regular-variation slope {check.slope:.4f} (expected {check.expected:.4f})")
            update["rv_check"] = check
        except ParameterDomainError as e:
            messages.append(f"Regular-variation check skipped: {e}")

        if spec.memory >= 1:
            a = config.a or 1.0
            table = single_lag_limit_check(
                spec, 1, a, section.n_grid, section.reps, experiment_stream(seed, "single_lag")
            )
            last = table.rows[-1]
            messages.append(f"Lag-1 limit {table.limit:.6g}; at n={last.n}: {last.lhs:.6g} +- {last.se:.2g}")
            rows = hoeffding_identity_check(
                spec, 1, list(HOEFFDING_LEVELS), section.reps, experiment_stream(seed, "hoeffding")
            )
            held = sum(row.within_envelope for row in rows)
            messages.append(f"Hoeffding identity within envelope at {held}/{len(rows)} truncation level(s)")
            update.update(single_lag_table=table, hoeffding_rows=rows)

        if 1 < spec.alpha < 2:
            spectral = spectral_covariance_condition(spec)
            messages.append(
                f"Spectral covariance sum: {spectral.value:.6g}" + (" [diverging]" if spectral.diverging else "")
            )
            update["spectral_condition"] = spectral
        return update

    if experiment == Experiment.MAIN:
        report = verify_main(config, experiment_stream(seed, "main"), state.config_hash)
        for row in report.rows:
            messages.append(f"n={row.n}: KS={row.ks:.4f} (floor {row.ks_noise_floor:.4f}), ECF gap={row.ecf_gap:.4f}")
        split = truncation_split_check(config, experiment_stream(seed, "split"))
        messages.append(f"Truncation split at a={split.a:.4g}: limit bound {split.limit_bound:.4g}")
        return {"convergence_report": report, "split_table": split}

    if experiment == Experiment.ALPHA1:
        report = verify_alpha1_identity(spec, config.n_grid, config.reps, experiment_stream(seed, "alpha1"))
        for row in report.rows:
            messages.append(f"n={row.n}: two-sample KS={row.ks:.4f}, p={row.p_value:.3g}")
        return {"alpha1_report": report}

    if experiment == Experiment.TANGENT:
        grid = config.lambda_grid
        table = verify_tangent_convergence(spec, config.tangent.N_grid, grid)
        for row in table.rows:
            messages.append(f"N={row.N}: CF gap={row.gap:.3e}")
        return {"tangent_table": table}

    if experiment == Experiment.FUNCTIONAL:
        section = config.functional
        report = verify_functional(
            spec,
            section.n_grid,
            section.reps,
            section.t_points,
            experiment_stream(seed, "functional"),
            oracle_steps=section.oracle_steps,
            a=config.a or 1.0,
        )
        for row in report.rows:
            messages.append(f"n={row.n}: sup KS={row.sup_ks:.4f} ({row.oracle}), factorization gap={row.factorization_gap:.4f}")
        return {"functional_report": report}

    section = config.newman
    stream = experiment_stream(seed, "newman")
    if section.battery:
        reports = newman_battery(section.reps, stream, a=section.a, lam=section.lam)
    else:
        reports = [newman_gap_check(spec, section.m, section.N, section.a, section.lam, section.reps, stream)]
    held = sum(r.holds for r in reports)
    messages.append(f"Newman inequality held in {held}/{len(reports)} configuration(s)")
    return {"newman_reports": reports}


def run_verification_node(state: LabState) -> dict:
    """
    Run the requested experiment.

    Usage errors (an experiment that does not apply to the config) and
    numeric failures are recorded with their kind so the CLI can map them
    to exit codes.
    """
    messages = list(state.messages)
    messages.append(f"Running experiment '{Experiment(state.experiment).value}'...")

    try:
        update = _run(state, messages)
    except (UsageError, ContractError) as e:
        messages.append(f"Experiment not applicable: {e}")
        return {"status": WorkflowStatus.FAILED, "error_kind": "usage", "error_message": str(e), "messages": messages}
    except NumericError as e:
        best = f" (best estimate {e.best!r})" if e.best is not None else ""
        messages.append(f"Numeric failure: {e}{best}")
        return {"status": WorkflowStatus.FAILED, "error_kind": "numeric", "error_message": str(e), "messages": messages}
    except LabError as e:
        messages.append(f"Experiment failed: {e}")
        return {"status": WorkflowStatus.FAILED, "error_kind": "other", "error_message": str(e), "messages": messages}

    update["messages"] = messages
    update["status"] = WorkflowStatus.COMPLETED
    return update

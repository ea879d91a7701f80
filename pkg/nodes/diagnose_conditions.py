"""
Node: Diagnose Conditions

Evaluate the summability condition the limit theorem rests on. The closed
form side decides whether verification may run; the diagnose experiment
also gets the Monte Carlo side with its verdict.
"""

from ..exceptions import LabError, NumericError
from ..state import Experiment, LabState, WorkflowStatus
from ..tools.rng import experiment_stream
from ..tools.tail_diagnostics import condition_part_report, lag_sum_divergence


def diagnose_conditions_node(state: LabState) -> dict:
    """
    Check the summability condition for the configured process.

    This node:
    1. Computes the closed-form lag sum and its divergence flag
    2. For the diagnose experiment, runs the Monte Carlo condition report
    3. Marks the precondition as failed for verification experiments
       whose lag sum diverges
    """
    messages = list(state.messages)
    config = state.config
    spec = config.spec
    messages.append("Evaluating the closed-form summability condition...")

    lag_sum = lag_sum_divergence(spec)
    messages.append(
        f"Closed-form lag sum: {lag_sum.value:.6g} over {len(lag_sum.per_lag)} lag(s)"
        + (" [diverging]" if lag_sum.diverging else "")
    )
    update: dict = {"lag_sum": lag_sum}

    if state.experiment == Experiment.DIAGNOSE:
        section = config.diagnose
        messages.append(
            f"Monte Carlo condition report: n_grid={section.n_grid}, reps={section.reps}..."
        )
        try:
            report = condition_part_report(
                spec, section.n_grid, section.reps, experiment_stream(config.master_seed, "diagnose")
            )
        except LabError as e:
            messages.append(f"Condition report failed: {e}")
            return {
                **update,
                "status": WorkflowStatus.FAILED,
                "error_kind": "numeric" if isinstance(e, NumericError) else "other",
                "error_message": str(e),
                "messages": messages,
            }
        verdict = report.verdict.value if hasattr(report.verdict, "value") else report.verdict
        messages.append(f"Condition verdict: {verdict} (rhs={report.rhs_limit:.6g})")
        update["condition_report"] = report

    elif lag_sum.diverging:
        messages.append("Precondition failed: the lag sum of truncated covariances diverges")
        return {
            **update,
            "status": WorkflowStatus.PRECONDITION_FAILED,
            "error_kind": "usage",
            "error_message": "summability condition diverges; the limit theorem does not apply",
            "messages": messages,
        }

    update["messages"] = messages
    return update

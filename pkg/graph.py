"""
Main LangGraph definition for the Stable Limit Lab.

This module defines the pipeline graph that runs one experiment:
1. Config loading and schema validation
2. Diagnosis of the summability condition
3. Verification (gated on the closed-form condition)
4. Report output
"""

import time
from pathlib import Path
from typing import Literal

from langgraph.graph import END, StateGraph
from rich.console import Console

from .config import __version__
from .nodes.diagnose_conditions import diagnose_conditions_node
from .nodes.load_config import load_config_node
from .nodes.run_verification import run_verification_node
from .nodes.write_outputs import write_outputs_node
from .state import Experiment, LabState, RunManifest, WorkflowStatus
from .tools.output_saver import get_run_output_dir, save_final_summary, save_manifest, save_messages_log

console = Console()


# -----------------------------------------------------------------------------
# Conditional Edge Functions
# -----------------------------------------------------------------------------


def _get_status(state: LabState) -> str:
    """Helper to get status as string."""
    return state.status.value if hasattr(state.status, "value") else state.status


def check_after_load(state: LabState) -> Literal["diagnose_conditions", "end"]:
    """Stop when the config was rejected."""
    if _get_status(state) == "failed" or state.config is None:
        return "end"
    return "diagnose_conditions"


def check_precondition(state: LabState) -> Literal["run_verification", "write_outputs"]:
    """
    Run verification only when the closed-form side of the summability
    condition is finite; otherwise go straight to output.
    """
    if _get_status(state) in ("failed", "precondition_failed"):
        return "write_outputs"
    return "run_verification"


# -----------------------------------------------------------------------------
# Graph Definition
# -----------------------------------------------------------------------------


def create_lab_graph() -> StateGraph:
    """
    Create the LangGraph pipeline.

    The graph follows this flow:
    1. load_config -> [rejected: END]
    2. diagnose_conditions -> [precondition failed: write_outputs]
    3. run_verification -> write_outputs
    4. END
    """
    workflow = StateGraph(LabState)

    workflow.add_node("load_config", load_config_node)
    workflow.add_node("diagnose_conditions", diagnose_conditions_node)
    workflow.add_node("run_verification", run_verification_node)
    workflow.add_node("write_outputs", write_outputs_node)

    workflow.set_entry_point("load_config")

    workflow.add_conditional_edges(
        "load_config",
        check_after_load,
        {
            "diagnose_conditions": "diagnose_conditions",
            "end": END,
        },
    )
    workflow.add_conditional_edges(
        "diagnose_conditions",
        check_precondition,
        {
            "run_verification": "run_verification",
            "write_outputs": "write_outputs",
        },
    )
    workflow.add_edge("run_verification", "write_outputs")
    workflow.add_edge("write_outputs", END)

    return workflow


def compile_graph():
    """Compile the graph; runs are one-shot, so no checkpointer is attached."""
    return create_lab_graph().compile()


# Create a default compiled graph instance
app = compile_graph()


# -----------------------------------------------------------------------------
# Convenience Functions
# -----------------------------------------------------------------------------


def run_experiment(
    config_path: str,
    experiment: Experiment | str,
    seed_override: int | None = None,
    workers: int = 1,
    out_dir: str | None = None,
    reproducible: bool = False,
    save_outputs: bool = True,
) -> LabState:
    """
    Run one experiment through the pipeline.

    Args:
        config_path: JSON experiment config
        experiment: Which experiment to run
        seed_override: Replaces the config's master_seed
        workers: Worker threads (recorded in the manifest)
        out_dir: Run directory; a timestamped one is created when omitted
        reproducible: Suppress timestamps in SVGs, summary and manifest
        save_outputs: Write manifest, log and summary after the graph

    Returns:
        Final LabState with all reports
    """
    started = time.perf_counter()
    initial_state = LabState(
        config_path=str(config_path),
        experiment=Experiment(experiment),
        seed_override=seed_override,
        workers=workers,
        out_dir=out_dir,
        reproducible=reproducible,
        messages=[f"Starting experiment '{Experiment(experiment).value}'..."],
    )

    final_state = None
    printed_message_count = len(initial_state.messages)
    error_occurred = None

    try:
        for event in app.stream(initial_state, stream_mode="updates"):
            for node_name, node_output in event.items():
                if node_output and "messages" in node_output:
                    # Only print NEW messages
                    all_messages = node_output["messages"]
                    for msg in all_messages[printed_message_count:]:
                        console.print(f"[dim]\\[{node_name}][/dim] {msg}", highlight=False)
                    printed_message_count = len(all_messages)
                final_state = {**(final_state or initial_state.model_dump()), **(node_output or {})}

    except Exception as e:
        error_occurred = e
        console.print(f"[red]\\[error][/red] Pipeline failed: {e}")

    result_state = LabState(**final_state) if final_state else initial_state

    if error_occurred:
        result_state.status = WorkflowStatus.FAILED
        result_state.error_kind = result_state.error_kind or "other"
        result_state.error_message = str(error_occurred)
        result_state.messages.append(f"Pipeline failed with error: {error_occurred}")

    if save_outputs and result_state.config is not None:
        output_dir = get_run_output_dir(result_state.experiment.value, result_state.out_dir)
        result_state.out_dir = str(output_dir)
        manifest = RunManifest(
            experiment=result_state.experiment.value,
            config_hash=result_state.config_hash or "",
            master_seed=result_state.config.master_seed,
            tool_version=__version__,
            workers=workers,
            outputs=[Path(p).name for p in result_state.outputs]
            + ["manifest.json", "workflow_log.txt", "SUMMARY.md"],
            wall_clock_seconds=0.0 if reproducible else time.perf_counter() - started,
        )
        result_state.outputs.extend(
            str(p)
            for p in (
                save_manifest(output_dir, manifest),
                save_messages_log(output_dir, result_state.messages),
            )
        )
        result_state.outputs.append(str(output_dir / "SUMMARY.md"))
        save_final_summary(output_dir, result_state)
        console.print(f"[dim]\\[complete][/dim] Outputs saved to: {output_dir}")

    if error_occurred:
        raise error_occurred

    return result_state


def get_graph_visualization() -> str:
    """
    Get a visualization of the graph structure.

    Returns:
        Mermaid diagram string
    """
    try:
        return app.get_graph().draw_mermaid()
    except (AttributeError, ImportError):
        return """
graph TD
    load_config --> |config rejected| END
    load_config --> diagnose_conditions
    diagnose_conditions --> |precondition failed| write_outputs
    diagnose_conditions --> run_verification
    run_verification --> write_outputs
    write_outputs --> END
"""

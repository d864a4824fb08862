"""
Verifier Graph - residual certification and diagnostics

This squad handles:
- verify: sample a region and certify every residual channel of a solution
- separability: probe whether a candidate invariant reduces the system
- bounds: certified bounds of the dilation lapse and metric
"""

from langgraph.graph import StateGraph, END

from electrovac.core.invariants import invariant_from_descriptor
from electrovac.core.solutions import system_from_descriptor
from electrovac.shared.state import RunState
from electrovac.shared.utils import ElectrovacError, logger

from .tools import (
    Region,
    bounds_report,
    separability_report,
    verify,
    write_payload,
    write_points_csv,
    write_report,
)


def _failure(state: RunState, error: ElectrovacError) -> dict:
    logger.error(f"{state.get('command')} failed: {type(error).__name__}: {error}")
    return {
        "exit_code": 1,
        "error": error.to_dict(),
        "messages": [f"{state.get('command')}: {type(error).__name__}"],
    }


def _save(payload: dict, path) -> list[str]:
    if not path:
        return []
    write_payload(payload, path)
    return [path]


def _region_for(system, region_config) -> Region:
    return Region.from_system(
        system,
        region_config.lower,
        region_config.upper,
        region_config.eps_center,
        region_config.hyperplane_margin,
    )


def verify_node(state: RunState) -> dict:
    """
    Build the configured solution and certify it on its region.

    Args:
        state: Run state holding a VerifyConfig.

    Returns:
        Report payload, exit code (0 pass, 1 fail) and written artifacts.
    """
    config = state["config"]
    artifacts = []
    try:
        system = system_from_descriptor(config.solution.model_dump())
        region = _region_for(system, config.region)
        report = verify(system, region, config.points, config.tolerances, config.seed, config.threads)
        report.config = config.model_dump(mode="json")
        if config.output.report:
            write_report(report, config.output.report)
            artifacts.append(config.output.report)
        if config.output.csv:
            write_points_csv(report, config.output.csv)
            artifacts.append(config.output.csv)
    except ElectrovacError as e:
        return _failure(state, e)

    return {
        "result": report.model_dump(mode="json"),
        "exit_code": 0 if report.passed else 1,
        "messages": [f"verify: {system.label} {report.verdict}"],
        "artifacts": artifacts,
    }


def separability_node(state: RunState) -> dict:
    """Probe the Laplacian ratio of an invariant on its level sets."""
    config = state["config"]
    try:
        xi = invariant_from_descriptor(config.invariant.model_dump())
        box = None if config.box is None else (config.box.lower, config.box.upper)
        payload = separability_report(xi, config.levels, config.points, config.seed, box, config.tol_sep)
    except ElectrovacError as e:
        return _failure(state, e)

    payload["config"] = config.model_dump(mode="json")
    return {
        "result": payload,
        "exit_code": 0 if payload["verdict"] == "separable" else 1,
        "messages": [f"separability: {payload['verdict']}"],
        "artifacts": _save(payload, config.output.report),
    }


def bounds_node(state: RunState) -> dict:
    """Certified bounds of U = 1/N and of the metric ratio for a dilation solution."""
    config = state["config"]
    try:
        system = system_from_descriptor(config.solution.model_dump())
        region = _region_for(system, config.region)
        payload = bounds_report(system, region, config.points, config.seed)
    except ElectrovacError as e:
        return _failure(state, e)

    payload["config"] = config.model_dump(mode="json")
    update = {
        "result": payload,
        "exit_code": 0 if payload["verdict"] == "pass" else 1,
        "messages": [f"bounds: {payload['verdict']}"],
        "artifacts": _save(payload, config.output.report),
    }
    if payload["error"] is not None:
        update["error"] = payload["error"]
    return update


def dispatch_node(state: RunState) -> dict:
    return {"messages": [f"verifier: {state.get('command', 'verify')}"]}


def route_command(state: RunState) -> str:
    """
    Conditional edge selecting the node for the requested command.

    Args:
        state: Current run state.

    Returns:
        The name of the node to execute.
    """
    command = state.get("command", "verify")
    if command in ("separability", "bounds"):
        return command
    return "verify"


def build_verifier_graph() -> StateGraph:
    """
    Builds and compiles the verifier graph.

    Returns:
        A compiled StateGraph ready for execution.
    """
    graph = StateGraph(RunState)

    graph.add_node("dispatch", dispatch_node)
    graph.add_node("verify", verify_node)
    graph.add_node("separability", separability_node)
    graph.add_node("bounds", bounds_node)

    graph.set_entry_point("dispatch")
    graph.add_conditional_edges(
        "dispatch",
        route_command,
        {
            "verify": "verify",
            "separability": "separability",
            "bounds": "bounds",
        },
    )

    graph.add_edge("verify", END)
    graph.add_edge("separability", END)
    graph.add_edge("bounds", END)

    return graph.compile()


# Expose the compiled graph for import by the supervisor
verifier_graph = build_verifier_graph()

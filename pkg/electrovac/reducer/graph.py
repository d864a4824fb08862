"""
Reducer Graph - PDE to ODE reduction along an invariant

This squad handles:
- lapse: tabulate the MP-class lapse profile U(xi) of a separable invariant
- quadric: integrate the reduced quadric system as an initial value problem

Both nodes lift their profiles back to fields and, unless disabled,
verify the lifted system on the configured region.
"""

from langgraph.graph import StateGraph, END

from electrovac.core.invariants import QuadricInvariant, invariant_from_descriptor
from electrovac.shared.state import RunState
from electrovac.shared.utils import ElectrovacError, logger
from electrovac.verifier.tools import Region, resolve_tolerances, verify, write_payload

from .tools import (
    QuadricParameters,
    QuadricODEState,
    complete_initial_state,
    integrate_quadric_system,
    lift_profile_to_fields,
    lift_trajectory,
    mp_class_drift,
    mp_initial_state,
    mp_profiles_from_lapse,
    solve_lapse_from_invariant,
)


# Lifted fields carry interpolation error on top of rounding
LIFTED_TOLERANCE = 1e-6


def _failure(state: RunState, error: ElectrovacError) -> dict:
    logger.error(f"reduce failed: {type(error).__name__}: {error}")
    return {
        "exit_code": 1,
        "error": error.to_dict(),
        "messages": [f"reduce: {type(error).__name__}"],
    }


def _box(config):
    if config.region.lower is None or config.region.upper is None:
        return None
    return config.region.lower, config.region.upper


def _verify_lifted(system, config) -> dict:
    region = Region.from_system(
        system,
        config.region.lower,
        config.region.upper,
        config.region.eps_center,
        config.region.hyperplane_margin,
    )
    tolerances = resolve_tolerances(config.tolerances, default=LIFTED_TOLERANCE)
    report = verify(system, region, config.points, tolerances, config.seed, config.threads)
    return report.model_dump(mode="json", exclude={"config", "timestamp"})


def _finish(config, result: dict, artifacts: list[str], label: str) -> dict:
    lifted = result.get("lifted")
    passed = lifted is None or lifted["verdict"] == "pass"
    result["verdict"] = "pass" if passed else "fail"
    result["config"] = config.model_dump(mode="json")
    if config.output.report:
        write_payload(result, config.output.report)
        artifacts.append(config.output.report)
    return {
        "result": result,
        "exit_code": 0 if passed else 1,
        "messages": [f"reduce[{label}]: {result['verdict']}"],
        "artifacts": artifacts,
    }


def lapse_node(state: RunState) -> dict:
    """
    Solve the lapse along a separable invariant and lift the MP profiles.

    Args:
        state: Run state holding a ReduceConfig in lapse mode.

    Returns:
        Profile summary, lifted verification report and artifacts.
    """
    config = state["config"]
    reduction = config.reduction
    artifacts: list[str] = []
    try:
        inv = invariant_from_descriptor(reduction.invariant.model_dump())
        solution = solve_lapse_from_invariant(
            inv,
            reduction.k,
            reduction.k1,
            reduction.interval,
            reduction.abs_tol,
            check_separability=reduction.check_separability,
            box=_box(config),
            seed=config.seed,
        )
        if config.output.csv:
            solution.to_csv(config.output.csv)
            artifacts.append(config.output.csv)

        result = {"mode": "lapse", "invariant": inv.to_descriptor(), "profile": solution.to_dict()}
        if config.points > 0:
            phi, N, psi = mp_profiles_from_lapse(solution.profile, inv.n, reduction.sign)
            system = lift_profile_to_fields(
                inv, phi, N, psi, 0.0, {"reduction": "lapse", "invariant": inv.to_descriptor()}
            )
            result["lifted"] = _verify_lifted(system, config)
    except ElectrovacError as e:
        return _failure(state, e)

    return _finish(config, result, artifacts, "lapse")


def _initial_state(initial, params: QuadricParameters) -> QuadricODEState:
    if initial.kind == "mp":
        return mp_initial_state(params, initial.xi0, initial.U, initial.dU, initial.sign)
    if initial.kind == "complete":
        return complete_initial_state(
            params, initial.xi0, initial.phi, initial.dphi, initial.N, initial.dN, initial.psi, initial.sign
        )
    return QuadricODEState(
        initial.xi0, initial.phi, initial.dphi, initial.N, initial.dN, initial.psi, initial.dpsi
    )


def quadric_node(state: RunState) -> dict:
    """
    Integrate the reduced quadric system and lift the trajectory.

    Args:
        state: Run state holding a ReduceConfig in quadric mode.

    Returns:
        Trajectory summary, MP-class drift for MP data, lifted verification
        report and artifacts.
    """
    config = state["config"]
    reduction = config.reduction
    artifacts: list[str] = []
    try:
        shape = reduction.invariant
        inv = QuadricInvariant(shape.n, shape.tau, shape.gamma, shape.theta)
        params = QuadricParameters.from_invariant(inv, reduction.Lambda)
        initial = _initial_state(reduction.initial, params)
        trajectory = integrate_quadric_system(
            initial, params, reduction.xi_end, reduction.rtol, reduction.atol, reduction.drift_tol
        )
        if config.output.csv:
            trajectory.to_csv(config.output.csv)
            artifacts.append(config.output.csv)

        result = {"mode": "quadric", "invariant": inv.to_descriptor(), "trajectory": trajectory.to_dict()}
        if reduction.initial.kind == "mp":
            result["mp_class_drift"] = mp_class_drift(trajectory, reduction.initial.sign)
        if config.points > 0:
            system = lift_trajectory(trajectory, inv, {"reduction": "quadric", "invariant": inv.to_descriptor()})
            result["lifted"] = _verify_lifted(system, config)
    except ElectrovacError as e:
        return _failure(state, e)

    return _finish(config, result, artifacts, "quadric")


def dispatch_node(state: RunState) -> dict:
    return {"messages": [f"reducer: {state['config'].reduction.mode}"]}


def route_mode(state: RunState) -> str:
    """
    Conditional edge selecting the reduction mode.

    Args:
        state: Current run state.

    Returns:
        "lapse" or "quadric".
    """
    return state["config"].reduction.mode


def build_reducer_graph() -> StateGraph:
    """
    Builds and compiles the reducer graph.

    Returns:
        A compiled StateGraph ready for execution.
    """
    graph = StateGraph(RunState)

    graph.add_node("dispatch", dispatch_node)
    graph.add_node("lapse", lapse_node)
    graph.add_node("quadric", quadric_node)

    graph.set_entry_point("dispatch")
    graph.add_conditional_edges(
        "dispatch",
        route_mode,
        {"lapse": "lapse", "quadric": "quadric"},
    )

    graph.add_edge("lapse", END)
    graph.add_edge("quadric", END)

    return graph.compile()


# Expose the compiled graph for import by the supervisor
reducer_graph = build_reducer_graph()

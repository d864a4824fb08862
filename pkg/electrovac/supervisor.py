"""
Supervisor - Command Router for the Verification Lab

This module routes a validated run configuration to one of two squads:
- Verifier (verify, separability, bounds)
- Reducer (lapse and quadric reductions)

Routing is rule based: the command fully determines the squad.
"""

from typing import Any, Literal

from pydantic import BaseModel, Field

from langgraph.graph import StateGraph, END

from electrovac.shared.state import RunState
from electrovac.shared.utils import logger
from electrovac.reducer import reducer_graph
from electrovac.verifier import verifier_graph


FINISH = "FINISH"

COMMAND_ROUTES = {
    "verify": "verifier",
    "separability": "verifier",
    "bounds": "verifier",
    "reduce": "reducer",
}


class RouteDecision(BaseModel):
    """
    Pydantic model for structured routing decisions.
    """
    next: Literal["verifier", "reducer", "FINISH"] = Field(
        description="The squad to route to, or FINISH when the command is unknown."
    )
    reasoning: str = Field(
        description="Brief explanation of why this routing decision was made."
    )


def determine_route(command: str) -> RouteDecision:
    """
    Map a command to its squad.

    Args:
        command: The CLI command name.

    Returns:
        The routing decision.
    """
    squad = COMMAND_ROUTES.get(command)
    if squad is None:
        return RouteDecision(next=FINISH, reasoning=f"unknown command {command!r}")
    return RouteDecision(next=squad, reasoning=f"{command} is handled by the {squad}")


def supervisor_node(state: RunState) -> dict:
    """
    The entry node that decides routing.

    Args:
        state: Current run state with the command and its configuration.

    Returns:
        Updated state with routing decision.
    """
    decision = determine_route(state.get("command", ""))
    logger.debug(f"supervisor: {decision.reasoning}")
    return {
        "next": decision.next,
        "messages": [f"supervisor: routing to {decision.next}"],
    }


def _squad_update(state: RunState, result: dict) -> dict:
    # sub-graphs return the full state; pass on only what they added
    seen_messages = len(state.get("messages", []))
    seen_artifacts = len(state.get("artifacts", []))
    update = {
        "messages": result.get("messages", [])[seen_messages:],
        "artifacts": result.get("artifacts", [])[seen_artifacts:],
    }
    for key in ("result", "exit_code", "error"):
        if key in result:
            update[key] = result[key]
    return update


def verifier_node(state: RunState) -> dict:
    """
    Wrapper node that invokes the verifier sub-graph.
    """
    return _squad_update(state, verifier_graph.invoke(state))


def reducer_node(state: RunState) -> dict:
    """
    Wrapper node that invokes the reducer sub-graph.
    """
    return _squad_update(state, reducer_graph.invoke(state))


def finish_node(state: RunState) -> dict:
    """
    Terminal node for commands no squad handles.
    """
    command = state.get("command")
    return {
        "exit_code": 2,
        "error": {"error": "UsageError", "message": f"unknown command {command!r}"},
        "messages": [f"supervisor: nothing to do for {command!r}"],
    }


def route_to_squad(state: RunState) -> str:
    """
    Conditional edge function that returns the next node based on state.

    Args:
        state: Current run state.

    Returns:
        The name of the next node to execute.
    """
    next_step = state.get("next", FINISH)

    if next_step == "verifier":
        return "verifier"
    elif next_step == "reducer":
        return "reducer"
    else:
        return "finish"


def build_supervisor_graph() -> StateGraph:
    """
    Builds and compiles the main supervisor graph.

    Returns:
        A compiled StateGraph routing commands to the squads.
    """
    graph = StateGraph(RunState)

    graph.add_node("supervisor", supervisor_node)
    graph.add_node("verifier", verifier_node)
    graph.add_node("reducer", reducer_node)
    graph.add_node("finish", finish_node)

    graph.set_entry_point("supervisor")

    graph.add_conditional_edges(
        "supervisor",
        route_to_squad,
        {
            "verifier": "verifier",
            "reducer": "reducer",
            "finish": "finish",
        },
    )

    # All squads route to END after processing
    graph.add_edge("verifier", END)
    graph.add_edge("reducer", END)
    graph.add_edge("finish", END)

    return graph.compile()


# Export the compiled supervisor graph
supervisor_graph = build_supervisor_graph()


def run_supervisor(command: str, config: Any) -> dict:
    """
    Run one command through the supervisor graph.

    Args:
        command: The command name (verify, reduce, separability, bounds).
        config: The validated run configuration for that command.

    Returns:
        The final state after graph execution.
    """
    initial_state = {
        "command": command,
        "config": config,
        "next": "",
        "exit_code": 0,
        "error": None,
        "messages": [],
        "artifacts": [],
    }
    return supervisor_graph.invoke(initial_state)

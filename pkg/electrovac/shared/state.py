"""
Global State Protocol for the command graph.
This defines the shared state that flows between the supervisor and the squads.
"""

from typing import Annotated, Any, Optional, TypedDict
import operator


class RunState(TypedDict, total=False):
    """
    The state shared across all nodes of one CLI run.

    Attributes:
        command: The requested command (verify, reduce, separability, bounds).
        config: The validated pydantic run configuration.
        next: The next squad to route to (used by conditional edges).
        result: JSON-ready payload produced by the squad.
        exit_code: Process exit code decided by the squad (0 pass, 1 fail).
        error: Error payload when the run raised an ElectrovacError.
        messages: Human-readable progress lines, accumulated with operator.add.
        artifacts: Paths written during the run, accumulated with operator.add.
    """
    command: str
    config: Any
    next: str
    result: dict[str, Any]
    exit_code: int
    error: Optional[dict[str, Any]]
    messages: Annotated[list[str], operator.add]
    artifacts: Annotated[list[str], operator.add]

"""LangGraph orchestration of a single scenario run."""

from functools import lru_cache
from typing import Any

from langgraph.constants import END, START
from langgraph.graph import StateGraph

from .nodes import bases_node, diagnose_node, discretize_node, integrate_node, recover_node
from .state import RunState
from ..config import Settings, get_settings
from ..spectral.fluid import FluidEigenBasis
from ..spectral.solid import SolidEigenBasis
from ...models import Scenario


def _after_integrate(state: RunState) -> str:
    return "recover" if state.get("recover", True) else "diagnose"


def create_run_graph() -> Any:
    """Create and compile the run graph.

    The graph executes in order:
    1. discretize: grids and motion assumption
    2. bases: fluid and solid eigenbases
    3. integrate: Galerkin trajectory
    4. recover: multiplier and pressure (skipped when `recover` is false)
    5. diagnose: energy records and the verification report

    Returns:
        Compiled graph ready for execution.
    """
    builder = StateGraph(RunState)

    builder.add_node("discretize", discretize_node)
    builder.add_node("bases", bases_node)
    builder.add_node("integrate", integrate_node)
    builder.add_node("recover", recover_node)
    builder.add_node("diagnose", diagnose_node)

    builder.add_edge(START, "discretize")
    builder.add_edge("discretize", "bases")
    builder.add_edge("bases", "integrate")
    builder.add_conditional_edges("integrate", _after_integrate, ["recover", "diagnose"])
    builder.add_edge("recover", "diagnose")
    builder.add_edge("diagnose", END)

    return builder.compile()


@lru_cache(maxsize=1)
def get_run_graph() -> Any:
    """Get the compiled run graph instance (singleton via LRU cache)."""
    return create_run_graph()


def run_pipeline(
    scenario: Scenario,
    settings: Settings | None = None,
    recover: bool = True,
    fluid: FluidEigenBasis | None = None,
    solid: SolidEigenBasis | None = None,
) -> RunState:
    """Run one scenario end to end.

    ``fluid`` and ``solid`` may carry bases computed for a larger m or R on the
    same grids; they are truncated to the scenario's sizes.
    """
    graph = get_run_graph()

    initial_state: RunState = {
        "scenario": scenario,
        "settings": settings or get_settings(),
        "recover": recover,
        "fluid": fluid,
        "solid": solid,
    }

    return graph.invoke(initial_state)

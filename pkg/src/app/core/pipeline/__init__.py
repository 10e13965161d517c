"""Run orchestration: a langgraph StateGraph from scenario to verification report."""

from .graph import create_run_graph, get_run_graph, run_pipeline
from .state import RunState

__all__ = ["RunState", "create_run_graph", "get_run_graph", "run_pipeline"]

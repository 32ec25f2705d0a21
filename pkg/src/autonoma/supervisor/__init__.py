"""Plan execution: dispatch, health checks, retries, and result collection."""

from .engine import (
    HEALTHY,
    STALLED,
    EventSink,
    WorkflowEngine,
    default_order,
    health_check,
    run_workflow,
    select_agent,
)
from .results import FAILED, SKIPPED, SUCCEEDED, ExecutionPolicy, TaskResult, WorkflowResult
from .simulate import ScriptedSimAgent, SimBehavior, SimulatedAgent, flaky

__all__ = [
    "FAILED",
    "HEALTHY",
    "SKIPPED",
    "STALLED",
    "SUCCEEDED",
    "EventSink",
    "ExecutionPolicy",
    "ScriptedSimAgent",
    "SimBehavior",
    "SimulatedAgent",
    "TaskResult",
    "WorkflowEngine",
    "WorkflowResult",
    "default_order",
    "flaky",
    "health_check",
    "run_workflow",
    "select_agent",
]

"""Domain types, plan validation, and the workflow state machine."""

from .machine import is_busy, replay, transition
from .plan import dependency_levels, descendants, validate_plan
from .types import (
    BUSY_STATUSES,
    TERMINAL_PHASES,
    TERMINAL_STATUSES,
    EventKind,
    Lang,
    Message,
    Plan,
    PlanStep,
    Role,
    TaskPhase,
    TaskStatus,
    ValidatedPlan,
    WorkflowEvent,
    WorkflowState,
    WorkflowStatus,
)

__all__ = [
    "BUSY_STATUSES",
    "TERMINAL_PHASES",
    "TERMINAL_STATUSES",
    "EventKind",
    "Lang",
    "Message",
    "Plan",
    "PlanStep",
    "Role",
    "TaskPhase",
    "TaskStatus",
    "ValidatedPlan",
    "WorkflowEvent",
    "WorkflowState",
    "WorkflowStatus",
    "dependency_levels",
    "descendants",
    "is_busy",
    "replay",
    "transition",
    "validate_plan",
]

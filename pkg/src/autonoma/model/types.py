"""Core domain types shared by every other module.

All types are immutable values. The canonical serialized form of each type is
a JSON object with snake_case field names; seq and timestamps are integers
(UTC milliseconds, or logical milliseconds under a logical clock). That
serialization is both the persistence format and the wire format, and it must
round-trip bit-exactly — see :mod:`autonoma.model.serialize`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum


class Role(str, Enum):
    """Who produced a message or performed an action."""

    USER = "user"
    COORDINATOR = "coordinator"
    PLANNER = "planner"
    SUPERVISOR = "supervisor"
    AGENT = "agent"
    REPORTER = "reporter"


class Lang(str, Enum):
    """Coarse language tag; detection heuristic lives in the coordinator."""

    EN = "en"
    AR = "ar"
    UND = "und"


@dataclass(frozen=True)
class Message:
    """One conversation message.

    ``attachments`` holds artifact references (ids under the conversation's
    artifact directory); it never embeds content.
    """

    id: str
    role: Role
    content: str
    lang: Lang
    attachments: tuple[str, ...]
    timestamp: int


@dataclass(frozen=True)
class PlanStep:
    """A single plan step.

    ``depends_on`` is kept sorted so equal step sets serialize identically.
    """

    id: str
    description: str
    required_capability: str
    agent_hint: str | None = None
    depends_on: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "depends_on", tuple(sorted(set(self.depends_on))))


@dataclass(frozen=True)
class Plan:
    """Planner output: a thought plus capability-tagged steps forming a DAG."""

    thought: str
    steps: tuple[PlanStep, ...]
    created_by: str = "unknown"

    def step_ids(self) -> tuple[str, ...]:
        return tuple(s.id for s in self.steps)


@dataclass(frozen=True)
class ValidatedPlan:
    """A plan that passed validation, annotated with dependency levels.

    ``levels[i]`` lists the step ids whose longest dependency path from any
    root has length i; steps within one level are mutually independent.
    """

    plan: Plan
    levels: tuple[tuple[str, ...], ...]


class TaskPhase(str, Enum):
    PENDING = "Pending"
    DISPATCHED = "Dispatched"
    RUNNING = "Running"
    STALLED = "Stalled"  # live-view only; never produced by replay
    RETRYING = "Retrying"
    SUCCEEDED = "Succeeded"
    FAILED = "Failed"
    SKIPPED = "Skipped"


TERMINAL_PHASES = frozenset({TaskPhase.SUCCEEDED, TaskPhase.FAILED, TaskPhase.SKIPPED})


@dataclass(frozen=True)
class TaskStatus:
    """Execution status of one plan step."""

    phase: TaskPhase = TaskPhase.PENDING
    attempts: int = 0
    last_heartbeat: int | None = None


class WorkflowStatus(str, Enum):
    CREATED = "Created"
    AWAITING_CLARIFICATION = "AwaitingClarification"
    PLANNING = "Planning"
    EXECUTING = "Executing"
    AWAITING_APPROVAL = "AwaitingApproval"
    REPORTING = "Reporting"
    COMPLETE = "Complete"
    PARTIAL_FAILURE = "PartialFailure"
    FAILED = "Failed"
    REJECTED = "Rejected"


TERMINAL_STATUSES = frozenset(
    {
        WorkflowStatus.COMPLETE,
        WorkflowStatus.PARTIAL_FAILURE,
        WorkflowStatus.FAILED,
        WorkflowStatus.REJECTED,
    }
)

#: Statuses during which a conversation refuses new prompts (single writer).
BUSY_STATUSES = frozenset(
    {
        WorkflowStatus.PLANNING,
        WorkflowStatus.EXECUTING,
        WorkflowStatus.AWAITING_APPROVAL,
        WorkflowStatus.REPORTING,
    }
)


class EventKind(str, Enum):
    PROMPT_RECEIVED = "PromptReceived"
    INTENT_CLASSIFIED = "IntentClassified"
    HANDOFF_TO_PLANNER = "HandoffToPlanner"
    PLAN_PROPOSED = "PlanProposed"
    TASK_DISPATCHED = "TaskDispatched"
    HEARTBEAT = "Heartbeat"
    TASK_RETRIED = "TaskRetried"
    TASK_SUCCEEDED = "TaskSucceeded"
    TASK_FAILED = "TaskFailed"
    HANDOFF_RECORDED = "HandoffRecorded"
    APPROVAL_REQUESTED = "ApprovalRequested"
    APPROVAL_RESOLVED = "ApprovalResolved"
    REPORT_READY = "ReportReady"
    WORKFLOW_CLOSED = "WorkflowClosed"


@dataclass(frozen=True)
class WorkflowEvent:
    """Append-only, sequence-numbered record of everything that happens.

    ``seq`` is gapless from 1 within a conversation. Replaying the event log
    through :func:`autonoma.model.machine.replay` reconstructs the
    WorkflowState exactly; all state changes flow through events.
    """

    seq: int
    kind: EventKind
    payload: dict
    timestamp: int


@dataclass(frozen=True)
class WorkflowState:
    """Current workflow state of a conversation.

    ``seq`` (last applied event) and ``pending_approvals`` are bookkeeping
    fields that make the transition fold self-contained: seq enables gap
    detection, pending_approvals decides when AwaitingApproval may return to
    Executing.
    """

    status: WorkflowStatus = WorkflowStatus.CREATED
    task_states: dict = field(default_factory=dict)  # step id -> TaskStatus
    plan: ValidatedPlan | None = None
    seq: int = 0
    pending_approvals: frozenset = frozenset()

    def all_tasks_terminal(self) -> bool:
        return bool(self.task_states) and all(
            ts.phase in TERMINAL_PHASES for ts in self.task_states.values()
        )

    def counts(self) -> tuple[int, int, int]:
        """(succeeded, failed, skipped) task counts."""
        s = sum(1 for t in self.task_states.values() if t.phase is TaskPhase.SUCCEEDED)
        f = sum(1 for t in self.task_states.values() if t.phase is TaskPhase.FAILED)
        k = sum(1 for t in self.task_states.values() if t.phase is TaskPhase.SKIPPED)
        return s, f, k

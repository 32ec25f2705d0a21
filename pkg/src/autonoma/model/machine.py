"""The workflow state machine: a pure fold of events into WorkflowState.

The transition table below is the single source of truth for which event
kinds a status accepts and what they do. Everything that changes workflow
state flows through events, so replaying a log reconstructs state exactly;
the engine merely appends events that the table accepts. An IllegalTransition
therefore always signals an engine bug, never a user error.

Table overview (status -> accepted kinds):

    Created               PromptReceived, IntentClassified
    AwaitingClarification PromptReceived, IntentClassified
    Planning              HandoffToPlanner, HandoffRecorded, PlanProposed,
                          WorkflowClosed
    Executing             TaskDispatched, HandoffRecorded, Heartbeat,
                          TaskRetried, TaskSucceeded, TaskFailed,
                          ApprovalRequested, WorkflowClosed
    AwaitingApproval      everything Executing accepts, plus ApprovalResolved
    Reporting             HandoffRecorded, ReportReady, WorkflowClosed
    terminal statuses     PromptReceived (starts a fresh workflow)

Intent classes route Created/AwaitingClarification: CasualChat stays Created
(small talk is not a workflow), Harmful -> Rejected, Ambiguous ->
AwaitingClarification, Task -> Planning. The final TaskSucceeded/TaskFailed
that leaves every task terminal moves Executing -> Reporting. WorkflowClosed
computes the terminal status from task states: all Succeeded -> Complete,
at least one Succeeded and one Failed -> PartialFailure, else Failed.
"""

from __future__ import annotations

from ..errors import GapInSequence, IllegalTransition
from .plan import descendants
from .serialize import validated_plan_from_jsonable
from .types import (
    BUSY_STATUSES,
    TERMINAL_PHASES,
    TERMINAL_STATUSES,
    EventKind,
    TaskPhase,
    TaskStatus,
    WorkflowEvent,
    WorkflowState,
    WorkflowStatus,
)

_INTENT_ROUTE = {
    "CasualChat": WorkflowStatus.CREATED,
    "Harmful": WorkflowStatus.REJECTED,
    "Ambiguous": WorkflowStatus.AWAITING_CLARIFICATION,
    "Task": WorkflowStatus.PLANNING,
}

_EXECUTING_LIKE = frozenset({WorkflowStatus.EXECUTING, WorkflowStatus.AWAITING_APPROVAL})


def _illegal(state: WorkflowState, event: WorkflowEvent, why: str = "") -> IllegalTransition:
    detail = f" ({why})" if why else ""
    return IllegalTransition(
        f"event {event.kind.value} (seq {event.seq}) not accepted in status "
        f"{state.status.value}{detail}"
    )


def transition(state: WorkflowState, event: WorkflowEvent) -> WorkflowState:
    """Apply one event; returns the next state or raises.

    Raises GapInSequence when event.seq != state.seq + 1, IllegalTransition
    for any (status, event) pair outside the table.
    """
    if event.seq != state.seq + 1:
        raise GapInSequence(
            f"expected seq {state.seq + 1}, got {event.seq} ({event.kind.value})"
        )

    status, kind = state.status, event.kind

    if kind is EventKind.PROMPT_RECEIVED:
        if status is WorkflowStatus.CREATED or status is WorkflowStatus.AWAITING_CLARIFICATION:
            return _replace(state, event)
        if status in TERMINAL_STATUSES:
            # fresh workflow for the next task in the same conversation
            return WorkflowState(status=WorkflowStatus.CREATED, seq=event.seq)
        raise _illegal(state, event, "conversation busy")

    if kind is EventKind.INTENT_CLASSIFIED:
        if status not in (WorkflowStatus.CREATED, WorkflowStatus.AWAITING_CLARIFICATION):
            raise _illegal(state, event)
        intent_class = event.payload["intent"]["class"]
        if intent_class not in _INTENT_ROUTE:
            raise _illegal(state, event, f"unknown intent class {intent_class!r}")
        return _replace(state, event, status=_INTENT_ROUTE[intent_class])

    if kind is EventKind.HANDOFF_TO_PLANNER:
        if status is not WorkflowStatus.PLANNING:
            raise _illegal(state, event)
        return _replace(state, event)

    if kind is EventKind.PLAN_PROPOSED:
        if status is not WorkflowStatus.PLANNING:
            raise _illegal(state, event)
        vplan = validated_plan_from_jsonable(event.payload["plan"])
        tasks = {s.id: TaskStatus() for s in vplan.plan.steps}
        return _replace(
            state, event, status=WorkflowStatus.EXECUTING, plan=vplan, task_states=tasks
        )

    if kind is EventKind.HANDOFF_RECORDED:
        if status is WorkflowStatus.PLANNING or status is WorkflowStatus.REPORTING:
            return _replace(state, event)
        if status in _EXECUTING_LIKE:
            record = event.payload["record"]
            step_id = event.payload.get("step_id")
            # a dispatch ack moves the task Dispatched -> Running
            if step_id is not None and record["accepted"] and record["from_role"] == "supervisor":
                tasks = dict(state.task_states)
                ts = _require_task(state, event, step_id)
                if ts.phase is TaskPhase.DISPATCHED:
                    tasks[step_id] = TaskStatus(
                        phase=TaskPhase.RUNNING,
                        attempts=ts.attempts,
                        last_heartbeat=event.timestamp,
                    )
                    return _replace(state, event, task_states=tasks)
            return _replace(state, event)
        raise _illegal(state, event)

    if kind is EventKind.TASK_DISPATCHED:
        if status not in _EXECUTING_LIKE:
            raise _illegal(state, event)
        step_id = event.payload["step_id"]
        ts = _require_task(state, event, step_id)
        if ts.phase not in (TaskPhase.PENDING, TaskPhase.RETRYING):
            raise _illegal(state, event, f"step {step_id} in phase {ts.phase.value}")
        for dep in _deps_of(state, step_id):
            if state.task_states[dep].phase is not TaskPhase.SUCCEEDED:
                raise _illegal(state, event, f"dependency {dep} not Succeeded")
        tasks = dict(state.task_states)
        tasks[step_id] = TaskStatus(phase=TaskPhase.DISPATCHED, attempts=ts.attempts + 1)
        return _replace(state, event, task_states=tasks)

    if kind is EventKind.HEARTBEAT:
        if status not in _EXECUTING_LIKE:
            raise _illegal(state, event)
        step_id = event.payload["step_id"]
        ts = _require_task(state, event, step_id)
        if ts.phase is not TaskPhase.RUNNING:
            raise _illegal(state, event, f"heartbeat for non-running step {step_id}")
        tasks = dict(state.task_states)
        tasks[step_id] = TaskStatus(
            phase=TaskPhase.RUNNING, attempts=ts.attempts, last_heartbeat=event.timestamp
        )
        return _replace(state, event, task_states=tasks)

    if kind is EventKind.TASK_RETRIED:
        if status not in _EXECUTING_LIKE:
            raise _illegal(state, event)
        step_id = event.payload["step_id"]
        ts = _require_task(state, event, step_id)
        if ts.phase not in (TaskPhase.DISPATCHED, TaskPhase.RUNNING):
            raise _illegal(state, event, f"step {step_id} in phase {ts.phase.value}")
        tasks = dict(state.task_states)
        tasks[step_id] = TaskStatus(phase=TaskPhase.RETRYING, attempts=ts.attempts)
        return _replace(state, event, task_states=tasks)

    if kind is EventKind.TASK_SUCCEEDED:
        if status not in _EXECUTING_LIKE:
            raise _illegal(state, event)
        step_id = event.payload["step_id"]
        ts = _require_task(state, event, step_id)
        if ts.phase not in (TaskPhase.RUNNING, TaskPhase.DISPATCHED):
            raise _illegal(state, event, f"step {step_id} in phase {ts.phase.value}")
        tasks = dict(state.task_states)
        tasks[step_id] = TaskStatus(phase=TaskPhase.SUCCEEDED, attempts=ts.attempts)
        next_status = status
        if status is WorkflowStatus.EXECUTING and _all_terminal(tasks):
            next_status = WorkflowStatus.REPORTING
        return _replace(state, event, status=next_status, task_states=tasks)

    if kind is EventKind.TASK_FAILED:
        if status not in _EXECUTING_LIKE:
            raise _illegal(state, event)
        step_id = event.payload["step_id"]
        ts = _require_task(state, event, step_id)
        if ts.phase in TERMINAL_PHASES:
            raise _illegal(state, event, f"step {step_id} already terminal")
        tasks = dict(state.task_states)
        tasks[step_id] = TaskStatus(phase=TaskPhase.FAILED, attempts=ts.attempts)
        assert state.plan is not None
        for child in descendants(state.plan.plan, step_id):
            if tasks[child].phase is TaskPhase.PENDING:
                tasks[child] = TaskStatus(phase=TaskPhase.SKIPPED, attempts=0)
        next_status = status
        if status is WorkflowStatus.EXECUTING and _all_terminal(tasks):
            next_status = WorkflowStatus.REPORTING
        return _replace(state, event, status=next_status, task_states=tasks)

    if kind is EventKind.APPROVAL_REQUESTED:
        if status not in _EXECUTING_LIKE:
            raise _illegal(state, event)
        pending = state.pending_approvals | {event.payload["digest"]}
        return _replace(
            state, event, status=WorkflowStatus.AWAITING_APPROVAL, pending_approvals=pending
        )

    if kind is EventKind.APPROVAL_RESOLVED:
        if status is not WorkflowStatus.AWAITING_APPROVAL:
            raise _illegal(state, event)
        dig = event.payload["digest"]
        if dig not in state.pending_approvals:
            raise _illegal(state, event, "no matching pending approval")
        pending = state.pending_approvals - {dig}
        next_status = WorkflowStatus.AWAITING_APPROVAL if pending else WorkflowStatus.EXECUTING
        return _replace(state, event, status=next_status, pending_approvals=pending)

    if kind is EventKind.REPORT_READY:
        if status is not WorkflowStatus.REPORTING:
            raise _illegal(state, event)
        return _replace(state, event)

    if kind is EventKind.WORKFLOW_CLOSED:
        if status is WorkflowStatus.PLANNING:
            return _replace(state, event, status=WorkflowStatus.FAILED)
        if status in _EXECUTING_LIKE or status is WorkflowStatus.REPORTING:
            tasks = dict(state.task_states)
            for sid, ts in tasks.items():
                if ts.phase not in TERMINAL_PHASES:
                    tasks[sid] = TaskStatus(phase=TaskPhase.SKIPPED, attempts=ts.attempts)
            return _replace(
                state,
                event,
                status=_final_status(tasks),
                task_states=tasks,
                pending_approvals=frozenset(),
            )
        raise _illegal(state, event)

    raise _illegal(state, event, "unknown event kind")


def _final_status(tasks: dict) -> WorkflowStatus:
    succeeded = sum(1 for t in tasks.values() if t.phase is TaskPhase.SUCCEEDED)
    failed = sum(1 for t in tasks.values() if t.phase is TaskPhase.FAILED)
    if tasks and succeeded == len(tasks):
        return WorkflowStatus.COMPLETE
    if succeeded >= 1 and failed >= 1:
        return WorkflowStatus.PARTIAL_FAILURE
    return WorkflowStatus.FAILED


def _all_terminal(tasks: dict) -> bool:
    return all(t.phase in TERMINAL_PHASES for t in tasks.values())


def _deps_of(state: WorkflowState, step_id: str) -> tuple[str, ...]:
    assert state.plan is not None
    for step in state.plan.plan.steps:
        if step.id == step_id:
            return step.depends_on
    return ()


def _require_task(state: WorkflowState, event: WorkflowEvent, step_id: str) -> TaskStatus:
    try:
        return state.task_states[step_id]
    except KeyError:
        raise _illegal(state, event, f"unknown step {step_id!r}") from None


def _replace(state: WorkflowState, event: WorkflowEvent, **changes) -> WorkflowState:
    return WorkflowState(
        status=changes.get("status", state.status),
        task_states=changes.get("task_states", state.task_states),
        plan=changes.get("plan", state.plan),
        seq=event.seq,
        pending_approvals=changes.get("pending_approvals", state.pending_approvals),
    )


def replay(events: list[WorkflowEvent]) -> WorkflowState:
    """Fold transition over a gapless event log; pure function of the input."""
    state = WorkflowState()
    for event in events:
        state = transition(state, event)
    return state


def is_busy(state: WorkflowState) -> bool:
    """True while a workflow is active and new prompts must be refused."""
    return state.status in BUSY_STATUSES

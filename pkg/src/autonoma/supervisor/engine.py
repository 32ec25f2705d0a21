"""Workflow execution engine.

One engine instance per workflow is the single writer of that workflow's
event log. The engine is a discrete-event scheduler over an injected clock:

- logical mode: simulated agents declare their behavior per attempt and the
  engine realizes it as timers, advancing the logical clock to the next due
  timer; runs are deterministic and take no wall time.
- live mode: real agents execute on worker threads; acks, heartbeats, and
  results arrive through a thread-safe inbox, and the loop waits on the inbox
  with a timeout set by the next due timer.

Everything the engine does is expressed as events appended through the sink;
the workflow state machine validates each append, so scheduling bugs surface
as IllegalTransition instead of corrupt state.
"""

from __future__ import annotations

import heapq
import queue
import random
import threading
from dataclasses import dataclass
from typing import Protocol

from ..agentkit import (
    AgentRegistry,
    HookAbort,
    HookBoard,
    HookStage,
    InvokeOutcome,
    TaskPayload,
    invoke,
)
from ..agents.filemanager import ApprovalTokenBox
from ..clock import Clock, LogicalClock
from ..errors import NoCapableAgent
from ..model import (
    TERMINAL_PHASES,
    EventKind,
    PlanStep,
    TaskPhase,
    TaskStatus,
    ValidatedPlan,
    WorkflowEvent,
    WorkflowState,
    WorkflowStatus,
)
from ..model import events as ev
from ..model.serialize import digest
from .results import ExecutionPolicy, TaskResult, WorkflowResult
from .simulate import SimulatedAgent


class EventSink(Protocol):
    """The conversation runtime: appends events and mirrors state."""

    @property
    def state(self) -> WorkflowState: ...

    def emit(self, kind: EventKind, payload: dict) -> WorkflowEvent: ...


HEALTHY = "Healthy"
STALLED = "Stalled"


def health_check(task_state: TaskStatus, now_ms: int, policy: ExecutionPolicy) -> str:
    """Stalled iff now - last_heartbeat strictly exceeds the allowance."""
    if task_state.last_heartbeat is None:
        return HEALTHY
    if now_ms - task_state.last_heartbeat > policy.stall_threshold_ms():
        return STALLED
    return HEALTHY


def select_agent(step: PlanStep, registry: AgentRegistry) -> str:
    """Capability match; hint honored when it qualifies; lexicographic ties."""
    candidates = registry.agents_with(step.required_capability)
    if not candidates:
        raise NoCapableAgent(
            f"no agent declares {step.required_capability!r} for step {step.id!r}"
        )
    if step.agent_hint and step.agent_hint in candidates:
        return step.agent_hint
    return candidates[0]


def default_order(ready: list[tuple[int, int, PlanStep]]) -> list[tuple[int, int, PlanStep]]:
    """FIFO by (dependency level, declaration index) - the strategy hook default."""
    return sorted(ready, key=lambda t: (t[0], t[1]))


@dataclass
class _InFlight:
    step_id: str
    attempt: int
    agent_id: str
    acked: bool = False
    dispatched_at: int = 0
    cancel_flag: threading.Event | None = None
    awaiting_approval: bool = False
    approval_digest: str | None = None
    payload: TaskPayload | None = None
    live: bool = False


@dataclass
class _StepRuntime:
    first_dispatch_at: int | None = None
    health_epoch: int = 0
    retry_eligible_at: int | None = None


class WorkflowEngine:
    def __init__(
        self,
        sink: EventSink,
        vplan: ValidatedPlan,
        registry: AgentRegistry,
        policy: ExecutionPolicy,
        clock: Clock,
        conversation_id: str = "conv",
        artifacts_dir: str | None = None,
        hooks: HookBoard | None = None,
        token_box: ApprovalTokenBox | None = None,
        order_strategy=default_order,
        rng: random.Random | None = None,
        lang: str = "en",
    ):
        self.sink = sink
        self.vplan = vplan
        self.registry = registry
        self.policy = policy
        self.clock = clock
        self.conversation_id = conversation_id
        self.artifacts_dir = artifacts_dir
        self.hooks = hooks or HookBoard()
        self.token_box = token_box
        self.order_strategy = order_strategy
        self.rng = rng or random.Random(0)
        self.lang = lang

        self.logical = isinstance(clock, LogicalClock)
        self.steps = {s.id: s for s in vplan.plan.steps}
        self.decl_index = {s.id: i for i, s in enumerate(vplan.plan.steps)}
        self.level_of = {sid: i for i, lvl in enumerate(vplan.levels) for sid in lvl}

        self.inbox: queue.Queue = queue.Queue()
        self.timers: list[tuple[int, int, tuple]] = []  # (time, tick, action)
        self._tick = 0
        self.inflight: dict[str, _InFlight] = {}
        self.step_rt: dict[str, _StepRuntime] = {sid: _StepRuntime() for sid in self.steps}
        self.results: dict[str, TaskResult] = {}
        self.cancelled = False

    # -- external thread-safe controls (gateway) ------------------------------

    def submit_approval(self, action_digest: str, approved: bool) -> None:
        self.inbox.put(("approval", action_digest, approved))

    def cancel(self) -> None:
        self.inbox.put(("cancel",))

    # -- main loop -------------------------------------------------------------

    def run(self) -> WorkflowResult:
        """Execute until every step is terminal; returns the collected results."""
        self._dispatch_ready()
        while not self._done():
            if self.logical:
                self._step_logical()
            else:
                self._step_live()
            self._dispatch_ready()
        return self._collect()

    def _done(self) -> bool:
        status = self.sink.state.status
        if status in (WorkflowStatus.REPORTING,):
            return True
        if status in (
            WorkflowStatus.COMPLETE,
            WorkflowStatus.PARTIAL_FAILURE,
            WorkflowStatus.FAILED,
        ):
            return True
        return False

    def _step_logical(self) -> None:
        # external signals first (approvals injected between timer beats)
        try:
            sig = self.inbox.get_nowait()
        except queue.Empty:
            sig = None
        if sig is not None:
            self._handle_signal(sig)
            return
        if any(f.live and not f.awaiting_approval for f in self.inflight.values()):
            # a real agent is running under a logical clock: its signals come
            # through the inbox in wall time while logical time stands still
            # (invoke() bounds the wait with the agent's max_runtime)
            self._handle_signal(self.inbox.get())
            return
        if not self.timers:
            raise RuntimeError(
                "engine deadlock: no timers, no signals, workflow incomplete"
            )
        t, _, action = heapq.heappop(self.timers)
        self.clock.advance_to(t)
        self._handle_timer(action)

    def _step_live(self) -> None:
        timeout = None
        if self.timers:
            timeout = max(0.0, (self.timers[0][0] - self.clock.now_ms()) / 1000.0)
        try:
            sig = self.inbox.get(timeout=timeout)
        except queue.Empty:
            sig = None
        if sig is not None:
            self._handle_signal(sig)
        while self.timers and self.timers[0][0] <= self.clock.now_ms():
            _, _, action = heapq.heappop(self.timers)
            self._handle_timer(action)

    def _schedule(self, at_ms: int, action: tuple) -> None:
        self._tick += 1
        heapq.heappush(self.timers, (at_ms, self._tick, action))

    # -- dispatching -----------------------------------------------------------

    def _ready_steps(self) -> list[tuple[int, int, PlanStep]]:
        state = self.sink.state
        now = self.clock.now_ms()
        out = []
        for sid, step in self.steps.items():
            ts = state.task_states.get(sid)
            if ts is None or sid in self.inflight:
                continue
            if ts.phase is TaskPhase.PENDING:
                pass
            elif ts.phase is TaskPhase.RETRYING:
                eligible = self.step_rt[sid].retry_eligible_at
                if eligible is None or eligible > now:
                    continue
            else:
                continue
            if all(
                state.task_states[d].phase is TaskPhase.SUCCEEDED for d in step.depends_on
            ):
                out.append((self.level_of[sid], self.decl_index[sid], step))
        return out

    def _dispatch_ready(self) -> None:
        if self.cancelled:
            return
        running = len([f for f in self.inflight.values() if not f.awaiting_approval])
        by_agent: dict[str, int] = {}
        for f in self.inflight.values():
            if not f.awaiting_approval:
                by_agent[f.agent_id] = by_agent.get(f.agent_id, 0) + 1

        for _, _, step in self.order_strategy(self._ready_steps()):
            if running >= self.policy.max_concurrency:
                return
            try:
                agent_id = select_agent(step, self.registry)
            except NoCapableAgent:
                self._fail_without_dispatch(step, "no_capable_agent")
                continue
            if by_agent.get(agent_id, 0) >= self.policy.per_agent_concurrency:
                continue
            try:
                payload = self._build_payload(step)
            except HookAbort as abort:
                self._fail_without_dispatch(step, f"hook:{abort.hook_id}")
                continue
            self._dispatch(step, agent_id, payload)
            running += 1
            by_agent[agent_id] = by_agent.get(agent_id, 0) + 1

    def _fail_without_dispatch(self, step: PlanStep, cause: str) -> None:
        self.sink.emit(
            EventKind.TASK_FAILED,
            ev.task_failed(step.id, None, cause, attempts=0,
                           skipped=self._pending_descendants(step.id)),
        )
        self.results[step.id] = TaskResult(
            step_id=step.id, outcome="failed", cause=cause, attempts=0
        )

    def _pending_descendants(self, step_id: str) -> list[str]:
        """Steps this failure will skip; the fold recomputes authoritatively."""
        from ..model.plan import descendants

        state = self.sink.state
        return [
            sid
            for sid in descendants(self.vplan.plan, step_id)
            if state.task_states[sid].phase is TaskPhase.PENDING
        ]

    def _dispatch(self, step: PlanStep, agent_id: str, payload: TaskPayload) -> None:
        now = self.clock.now_ms()
        attempts_before = self.sink.state.task_states[step.id].attempts
        attempt = attempts_before + 1
        if self.step_rt[step.id].first_dispatch_at is None:
            self.step_rt[step.id].first_dispatch_at = now
        self.sink.emit(EventKind.TASK_DISPATCHED, ev.task_dispatched(step.id, agent_id, attempt))

        flight = _InFlight(step_id=step.id, attempt=attempt, agent_id=agent_id,
                           dispatched_at=now, payload=payload)
        self.inflight[step.id] = flight

        entry = self.registry.get(agent_id)
        impl = entry.implementation
        if self.logical and hasattr(impl, "plan_attempt"):
            self._start_simulated(step, flight, impl)
        else:
            flight.live = True
            self._start_live(step, flight, entry)
        self._schedule(now + self.policy.ack_timeout_ms, ("ack_check", step.id, attempt))

    def _build_payload(self, step: PlanStep) -> TaskPayload:
        inputs = {
            dep: self.results[dep].summary
            for dep in step.depends_on
            if dep in self.results and self.results[dep].outcome == "succeeded"
        }
        description = self.hooks.run(HookStage.PRE_TASK, step.description, {"step_id": step.id})
        return TaskPayload(
            conversation_id=self.conversation_id,
            step_id=step.id,
            description=description,
            capability=step.required_capability,
            lang=self.lang,
            params={"inputs": inputs},
            artifacts_dir=self.artifacts_dir,
        )

    # -- simulated execution ---------------------------------------------------

    def _start_simulated(self, step: PlanStep, flight: _InFlight, impl: SimulatedAgent) -> None:
        behavior = impl.plan_attempt(step, flight.attempt)
        now = self.clock.now_ms()
        if behavior.ack_delay_ms is None or behavior.ack_delay_ms > self.policy.ack_timeout_ms:
            return  # never acks in time; the ack_check timer will fire
        ack_at = now + behavior.ack_delay_ms
        self._schedule(ack_at, ("sim_ack", step.id, flight.attempt, behavior))

    def _handle_sim_ack(self, step_id: str, attempt: int, behavior) -> None:
        flight = self.inflight.get(step_id)
        if flight is None or flight.attempt != attempt:
            return
        self._record_ack(flight)
        now = self.clock.now_ms()
        if behavior.stall:
            beats = behavior.heartbeats_before_stall
            for k in range(1, beats + 1):
                self._schedule(
                    now + k * self.policy.heartbeat_interval_ms,
                    ("sim_beat", step_id, attempt),
                )
            return  # silence afterwards; health check will catch it
        if behavior.heartbeat_every_ms:
            k = 1
            while k * behavior.heartbeat_every_ms < behavior.duration_ms:
                self._schedule(
                    now + k * behavior.heartbeat_every_ms, ("sim_beat", step_id, attempt)
                )
                k += 1
        outcome = (
            InvokeOutcome(status="ok", summary=behavior.summary)
            if behavior.outcome == "ok"
            else InvokeOutcome(status="failed", cause=behavior.cause or "error")
        )
        self._schedule(now + behavior.duration_ms, ("sim_result", step_id, attempt, outcome))

    # -- live execution ----------------------------------------------------------

    def _start_live(self, step: PlanStep, flight: _InFlight, entry) -> None:
        flight.cancel_flag = threading.Event()
        payload = flight.payload
        manifest = entry.manifest
        impl = entry.implementation
        attempt = flight.attempt

        def _worker():
            self.inbox.put(("ack", step.id, attempt))
            outcome = invoke(
                impl,
                manifest,
                payload,
                manifest.grants,
                heartbeat=lambda: self.inbox.put(("beat", step.id, attempt)),
                clock=self.clock,
            )
            self.inbox.put(("result", step.id, attempt, outcome))

        threading.Thread(target=_worker, daemon=True, name=f"task-{step.id}").start()

    # -- signal/timer handling ---------------------------------------------------

    def _handle_signal(self, sig: tuple) -> None:
        kind = sig[0]
        if kind == "ack":
            _, step_id, attempt = sig
            flight = self.inflight.get(step_id)
            if flight and flight.attempt == attempt and not flight.acked:
                self._record_ack(flight)
        elif kind == "beat":
            _, step_id, attempt = sig
            self._handle_beat(step_id, attempt)
        elif kind == "result":
            _, step_id, attempt, outcome = sig
            self._handle_result(step_id, attempt, outcome)
        elif kind == "approval":
            _, action_digest, approved = sig
            self._handle_approval(action_digest, approved)
        elif kind == "cancel":
            self._handle_cancel()

    def _handle_timer(self, action: tuple) -> None:
        kind = action[0]
        if kind == "sim_ack":
            self._handle_sim_ack(action[1], action[2], action[3])
        elif kind == "sim_beat":
            self._handle_beat(action[1], action[2])
        elif kind == "sim_result":
            self._handle_result(action[1], action[2], action[3])
        elif kind == "ack_check":
            self._handle_ack_check(action[1], action[2])
        elif kind == "health":
            self._handle_health(action[1], action[2])
        elif kind == "redispatch":
            pass  # the dispatch loop re-evaluates readiness after any timer

    def _record_ack(self, flight: _InFlight) -> None:
        flight.acked = True
        self.sink.emit(
            EventKind.HANDOFF_RECORDED,
            ev.handoff_recorded(
                "supervisor",
                flight.agent_id,
                digest({"step": flight.step_id, "attempt": flight.attempt}),
                True,
                self.clock.now_ms(),
                step_id=flight.step_id,
            ),
        )
        self._arm_health(flight.step_id)

    def _arm_health(self, step_id: str) -> None:
        rt = self.step_rt[step_id]
        rt.health_epoch += 1
        fire_at = self.clock.now_ms() + self.policy.stall_threshold_ms() + 1
        self._schedule(fire_at, ("health", step_id, rt.health_epoch))

    def _handle_beat(self, step_id: str, attempt: int) -> None:
        flight = self.inflight.get(step_id)
        if flight is None or flight.attempt != attempt or not flight.acked:
            return
        if flight.awaiting_approval:
            return
        self.sink.emit(EventKind.HEARTBEAT, ev.heartbeat(step_id, flight.agent_id))
        self._arm_health(step_id)

    def _handle_health(self, step_id: str, epoch: int) -> None:
        flight = self.inflight.get(step_id)
        rt = self.step_rt[step_id]
        if flight is None or rt.health_epoch != epoch or flight.awaiting_approval:
            return
        ts = self.sink.state.task_states[step_id]
        if ts.phase is not TaskPhase.RUNNING:
            return
        if health_check(ts, self.clock.now_ms(), self.policy) == STALLED:
            self._cancel_flight(flight)
            del self.inflight[step_id]
            self._failed_attempt(step_id, flight.agent_id, "stalled")

    def _handle_ack_check(self, step_id: str, attempt: int) -> None:
        flight = self.inflight.get(step_id)
        if flight is None or flight.attempt != attempt or flight.acked:
            return
        self.sink.emit(
            EventKind.HANDOFF_RECORDED,
            ev.handoff_recorded(
                "supervisor",
                flight.agent_id,
                digest({"step": step_id, "attempt": attempt}),
                False,
                self.clock.now_ms(),
                step_id=step_id,
            ),
        )
        self._cancel_flight(flight)
        del self.inflight[step_id]
        self._failed_attempt(step_id, flight.agent_id, "ack_timeout")

    def _cancel_flight(self, flight: _InFlight) -> None:
        if flight.cancel_flag is not None:
            flight.cancel_flag.set()

    def _handle_result(self, step_id: str, attempt: int, outcome: InvokeOutcome) -> None:
        flight = self.inflight.get(step_id)
        if flight is None or flight.attempt != attempt:
            return  # stale result from a cancelled/stalled attempt

        if outcome.status == "pending_approval":
            approval = outcome.approval or {}
            flight.awaiting_approval = True
            flight.approval_digest = approval.get("digest", "")
            self.sink.emit(
                EventKind.APPROVAL_REQUESTED,
                ev.approval_requested(
                    step_id,
                    approval.get("digest", ""),
                    approval.get("description", ""),
                    approval.get("kind", ""),
                ),
            )
            return

        del self.inflight[step_id]
        state = self.sink.state
        attempts = state.task_states[step_id].attempts

        if outcome.status == "ok":
            try:
                self.hooks.run(
                    HookStage.POST_TASK,
                    {"step_id": step_id, "summary": outcome.summary, "data": outcome.data},
                    {"step_id": step_id},
                )
            except HookAbort as abort:
                self._failed_attempt(step_id, flight.agent_id, f"hook:{abort.hook_id}")
                return
            now = self.clock.now_ms()
            started = self.step_rt[step_id].first_dispatch_at or now
            self.sink.emit(
                EventKind.HANDOFF_RECORDED,
                ev.handoff_recorded(
                    flight.agent_id,
                    "supervisor",
                    digest({"step": step_id, "summary": outcome.summary}),
                    True,
                    now,
                    step_id=step_id,
                ),
            )
            self.sink.emit(
                EventKind.TASK_SUCCEEDED,
                ev.task_succeeded(
                    step_id,
                    flight.agent_id,
                    outcome.summary,
                    list(outcome.artifacts),
                    attempts,
                    now - started,
                ),
            )
            self.results[step_id] = TaskResult(
                step_id=step_id,
                outcome="succeeded",
                summary=outcome.summary,
                artifacts=outcome.artifacts,
                data=outcome.data,
                attempts=attempts,
                duration_ms=now - started,
                agent_id=flight.agent_id,
            )
        else:
            self._failed_attempt(step_id, flight.agent_id, outcome.cause or "error")

    def _failed_attempt(self, step_id: str, agent_id: str, cause: str) -> None:
        attempts = self.sink.state.task_states[step_id].attempts
        if attempts <= self.policy.retry_limit:
            backoff = self.policy.backoff_for(attempts)
            if self.policy.jitter_ms:
                backoff += self.rng.randrange(self.policy.jitter_ms)
            self.sink.emit(
                EventKind.TASK_RETRIED, ev.task_retried(step_id, cause, attempts, backoff)
            )
            eligible = self.clock.now_ms() + backoff
            self.step_rt[step_id].retry_eligible_at = eligible
            self._schedule(eligible, ("redispatch", step_id))
        else:
            delivered = cause not in ("ack_timeout", "stalled")
            now = self.clock.now_ms()
            self.sink.emit(
                EventKind.HANDOFF_RECORDED,
                ev.handoff_recorded(
                    agent_id,
                    "supervisor",
                    digest({"step": step_id, "cause": cause}),
                    delivered,
                    now,
                    step_id=step_id,
                ),
            )
            self.sink.emit(
                EventKind.TASK_FAILED,
                ev.task_failed(step_id, agent_id, cause, attempts,
                               skipped=self._pending_descendants(step_id)),
            )
            started = self.step_rt[step_id].first_dispatch_at or now
            self.results[step_id] = TaskResult(
                step_id=step_id,
                outcome="failed",
                cause=cause,
                attempts=attempts,
                duration_ms=now - started,
                agent_id=agent_id,
            )

    # -- approvals and cancellation ------------------------------------------------

    def _handle_approval(self, action_digest: str, approved: bool) -> None:
        flight = None
        for f in self.inflight.values():
            if f.awaiting_approval and f.approval_digest == action_digest:
                flight = f
                break
        if flight is None or action_digest not in self.sink.state.pending_approvals:
            return
        self.sink.emit(
            EventKind.APPROVAL_RESOLVED,
            ev.approval_resolved(action_digest, approved, flight.step_id),
        )
        if not approved:
            del self.inflight[flight.step_id]
            attempts = self.sink.state.task_states[flight.step_id].attempts
            now = self.clock.now_ms()
            self.sink.emit(
                EventKind.HANDOFF_RECORDED,
                ev.handoff_recorded(
                    flight.agent_id,
                    "supervisor",
                    digest({"step": flight.step_id, "cause": "approval_denied"}),
                    True,
                    now,
                    step_id=flight.step_id,
                ),
            )
            self.sink.emit(
                EventKind.TASK_FAILED,
                ev.task_failed(flight.step_id, flight.agent_id, "approval_denied", attempts,
                               skipped=self._pending_descendants(flight.step_id)),
            )
            started = self.step_rt[flight.step_id].first_dispatch_at or now
            self.results[flight.step_id] = TaskResult(
                step_id=flight.step_id,
                outcome="failed",
                cause="approval_denied",
                attempts=attempts,
                duration_ms=now - started,
                agent_id=flight.agent_id,
            )
            return

        token = self.token_box.mint(self.conversation_id, action_digest) if self.token_box else ""
        flight.awaiting_approval = False
        step = self.steps[flight.step_id]
        entry = self.registry.get(flight.agent_id)
        base = flight.payload
        flight.payload = TaskPayload(
            conversation_id=base.conversation_id,
            step_id=base.step_id,
            description=base.description,
            capability=base.capability,
            lang=base.lang,
            params=base.params,
            artifacts_dir=base.artifacts_dir,
            approval_token=token,
        )
        # continuation of the same attempt: no new dispatch event, no new ack
        if self.logical and hasattr(entry.implementation, "plan_attempt"):
            raise RuntimeError("approval flow requires live mode")
        self._resume_live(step, flight, entry)

    def _resume_live(self, step: PlanStep, flight: _InFlight, entry) -> None:
        flight.live = True
        flight.cancel_flag = threading.Event()
        payload = flight.payload
        attempt = flight.attempt

        def _worker():
            outcome = invoke(
                entry.implementation,
                entry.manifest,
                payload,
                entry.manifest.grants,
                heartbeat=lambda: self.inbox.put(("beat", step.id, attempt)),
                clock=self.clock,
            )
            self.inbox.put(("result", step.id, attempt, outcome))

        threading.Thread(target=_worker, daemon=True, name=f"resume-{step.id}").start()
        self._arm_health(step.id)

    def _handle_cancel(self) -> None:
        self.cancelled = True
        now = self.clock.now_ms()
        for step_id, flight in list(self.inflight.items()):
            self._cancel_flight(flight)
            attempts = self.sink.state.task_states[step_id].attempts
            self.sink.emit(
                EventKind.TASK_FAILED,
                ev.task_failed(step_id, flight.agent_id, "cancelled", attempts,
                               skipped=self._pending_descendants(step_id)),
            )
            started = self.step_rt[step_id].first_dispatch_at or now
            self.results[step_id] = TaskResult(
                step_id=step_id,
                outcome="failed",
                cause="cancelled",
                attempts=attempts,
                duration_ms=now - started,
                agent_id=flight.agent_id,
            )
            del self.inflight[step_id]
        remaining = [
            sid
            for sid, ts in self.sink.state.task_states.items()
            if ts.phase not in TERMINAL_PHASES
        ]
        self.sink.emit(
            EventKind.WORKFLOW_CLOSED, ev.workflow_closed("cancelled", skipped=remaining)
        )

    # -- results -----------------------------------------------------------------

    def _collect(self) -> WorkflowResult:
        state = self.sink.state
        ordered: list[TaskResult] = []
        for step in self.vplan.plan.steps:
            if step.id in self.results:
                ordered.append(self.results[step.id])
            else:
                ts = state.task_states.get(step.id)
                cause = None
                if ts is not None and ts.phase is TaskPhase.SKIPPED:
                    cause = self._skip_cause(step)
                ordered.append(
                    TaskResult(step_id=step.id, outcome="skipped", cause=cause or "skipped")
                )
        return WorkflowResult(final_status=state.status.value, results=tuple(ordered))

    def _skip_cause(self, step: PlanStep) -> str:
        failed = [
            d
            for d in step.depends_on
            if self.results.get(d) and self.results[d].outcome != "succeeded"
        ]
        return f"skipped:{failed[0]}" if failed else "skipped"


def run_workflow(
    sink: EventSink,
    vplan: ValidatedPlan,
    registry: AgentRegistry,
    policy: ExecutionPolicy,
    clock: Clock,
    **kwargs,
) -> WorkflowResult:
    """Execute one validated plan to completion under the policy bounds."""
    registry.begin_workflow()
    try:
        return WorkflowEngine(sink, vplan, registry, policy, clock, **kwargs).run()
    finally:
        registry.end_workflow()

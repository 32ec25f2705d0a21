"""Conversation runtime and the end-to-end prompt pipeline.

ConversationRuntime owns one conversation's event log: it assigns gapless
sequence numbers, folds every append through the state machine (so an illegal
append fails loudly instead of corrupting state), and fans events out to
subscribers. WorkflowPipeline drives a prompt through the full lifecycle:
classify, hand off, plan, execute, report, close.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field
from typing import Callable

from .agentkit import AgentRegistry, HookAbort, HookBoard, HookStage
from .agents.filemanager import ApprovalTokenBox
from .agents.reporter import Report, compile_report
from .clock import Clock, WallClock
from .coordinator import Coordinator, IntentClass
from .errors import NothingToReport, PlanParseError, ProviderUnavailable
from .model import (
    EventKind,
    Lang,
    Message,
    Role,
    WorkflowEvent,
    WorkflowState,
    WorkflowStatus,
    transition,
    validate_plan,
)
from .model import events as ev
from .model.serialize import digest, plan_to_jsonable
from .planner import Planner, PlanRequest, pregather
from .supervisor.engine import WorkflowEngine
from .supervisor.results import ExecutionPolicy, WorkflowResult


class ConversationRuntime:
    """Single-writer event log with state mirroring and fan-out."""

    def __init__(
        self,
        conversation_id: str | None = None,
        clock: Clock | None = None,
        on_event: Callable[[WorkflowEvent], None] | None = None,
    ):
        self.conversation_id = conversation_id or uuid.uuid4().hex
        self.clock = clock or WallClock()
        self.events: list[WorkflowEvent] = []
        self.messages: list[Message] = []
        self.state = WorkflowState()
        self.on_event = on_event
        self._lock = threading.RLock()
        self._message_counter = 0

    def emit(self, kind: EventKind, payload: dict) -> WorkflowEvent:
        with self._lock:
            event = WorkflowEvent(
                seq=len(self.events) + 1,
                kind=kind,
                payload=payload,
                timestamp=self.clock.now_ms(),
            )
            self.state = transition(self.state, event)  # engine-bug tripwire
            self.events.append(event)
        if self.on_event is not None:
            self.on_event(event)
        return event

    def add_message(self, message: Message) -> None:
        with self._lock:
            self.messages.append(message)

    def new_message(
        self, role: Role, content: str, lang: Lang, attachments: tuple[str, ...] = ()
    ) -> Message:
        # ids need uniqueness within the conversation only; a counter keeps
        # same-seed runs byte-identical (no entropy in the log)
        with self._lock:
            self._message_counter += 1
            mid = f"m{self._message_counter:04d}"
        return Message(
            id=mid,
            role=role,
            content=content,
            lang=lang,
            attachments=attachments,
            timestamp=self.clock.now_ms(),
        )


@dataclass
class PromptOutcome:
    intent_class: str
    final_status: str
    reply: str | None = None
    workflow: WorkflowResult | None = None
    report: Report | None = None


@dataclass
class PipelineConfig:
    policy: ExecutionPolicy = field(default_factory=ExecutionPolicy)
    pregather_budget: int = 0  # plan-time research off by default
    artifacts_dir: str | None = None


class WorkflowPipeline:
    """Wires the role agents together for one deployment."""

    def __init__(
        self,
        coordinator: Coordinator,
        planner: Planner,
        registry: AgentRegistry,
        config: PipelineConfig | None = None,
        clock: Clock | None = None,
        hooks: HookBoard | None = None,
        token_box: ApprovalTokenBox | None = None,
        search_tools: list | None = None,
    ):
        self.coordinator = coordinator
        self.planner = planner
        self.registry = registry
        self.config = config or PipelineConfig()
        self.clock = clock or WallClock()
        self.hooks = hooks or HookBoard()
        self.token_box = token_box or ApprovalTokenBox(clock=self.clock)
        self.search_tools = search_tools or []
        self.active_engines: dict[str, WorkflowEngine] = {}

    # -- entry point -----------------------------------------------------------

    def handle_prompt(
        self,
        runtime: ConversationRuntime,
        text: str,
        attachments: tuple[str, ...] = (),
        policy: ExecutionPolicy | None = None,
    ) -> PromptOutcome:
        """Drive one prompt to a settled workflow state. Blocking."""
        message = self.receive_prompt(runtime, text, attachments)
        return self.continue_after_prompt(runtime, message, policy)

    def receive_prompt(
        self, runtime: ConversationRuntime, text: str, attachments: tuple[str, ...] = ()
    ) -> Message:
        """Append the PromptReceived event; the gateway calls this synchronously
        so the HTTP response can return before the workflow completes."""
        from .coordinator import detect_language

        lang = detect_language(text)
        message = runtime.new_message(Role.USER, text, lang, attachments)
        runtime.add_message(message)
        runtime.emit(EventKind.PROMPT_RECEIVED, ev.prompt_received(message))
        return message

    def continue_after_prompt(
        self,
        runtime: ConversationRuntime,
        message: Message,
        policy: ExecutionPolicy | None = None,
        artifacts_dir: str | None = None,
        pregather_budget: int | None = None,
    ) -> PromptOutcome:
        policy = policy or self.config.policy
        lang = message.lang
        history = [m for m in runtime.messages if m.id != message.id]

        intent = self.coordinator.classify(message, history)
        reply_text = self.coordinator.reply_for(intent, lang)
        reply = None
        if reply_text is not None:
            reply = runtime.new_message(Role.COORDINATOR, reply_text, lang)
            runtime.add_message(reply)
        runtime.emit(
            EventKind.INTENT_CLASSIFIED,
            ev.intent_classified(
                intent.intent_class.value, intent.confidence, list(intent.cues), reply
            ),
        )
        if intent.intent_class is not IntentClass.TASK:
            return PromptOutcome(
                intent_class=intent.intent_class.value,
                final_status=runtime.state.status.value,
                reply=reply_text,
            )

        return self._run_task(runtime, message, lang, policy, artifacts_dir, pregather_budget)

    # -- task path ---------------------------------------------------------------

    def _run_task(
        self,
        runtime: ConversationRuntime,
        message: Message,
        lang: Lang,
        policy: ExecutionPolicy,
        artifacts_dir: str | None = None,
        pregather_budget: int | None = None,
    ) -> PromptOutcome:
        context = list(runtime.messages)
        runtime.emit(
            EventKind.HANDOFF_TO_PLANNER,
            ev.handoff_to_planner(runtime.conversation_id, digest(message.content)),
        )
        accepted = False
        for _ in range(policy.retry_limit + 1):
            record = self.coordinator.handoff_to_planner(
                runtime.conversation_id, context, self.planner.acknowledge_handoff
            )
            runtime.emit(
                EventKind.HANDOFF_RECORDED,
                ev.handoff_recorded(
                    record.from_role,
                    record.to_role,
                    record.payload_digest,
                    record.accepted,
                    record.timestamp,
                ),
            )
            if record.accepted:
                accepted = True
                break
        if not accepted:
            runtime.emit(EventKind.WORKFLOW_CLOSED, ev.workflow_closed("handoff_failed"))
            return self._failed_outcome(runtime)

        # plan-time research is off by default; a per-request budget enables it
        budget = pregather_budget if pregather_budget is not None else self.config.pregather_budget
        notes = None
        if budget > 0:
            notes = pregather(message.content, self.search_tools, budget, self.clock)

        vocabulary = self.registry.capabilities()
        try:
            request_text = self.hooks.run(HookStage.PRE_PLAN, message.content)
            plan = self.planner.make_plan(
                PlanRequest(
                    request_text=request_text,
                    context=tuple(context),
                    pregathered=notes,
                    capability_vocabulary=frozenset(vocabulary),
                )
            )
            vplan = validate_plan(plan, set(vocabulary))
            self.hooks.run(HookStage.POST_PLAN, plan_to_jsonable(plan))
        except HookAbort as abort:
            runtime.emit(EventKind.WORKFLOW_CLOSED, ev.workflow_closed(f"hook:{abort.hook_id}"))
            return self._failed_outcome(runtime)
        except (PlanParseError, ProviderUnavailable) as err:
            runtime.emit(
                EventKind.WORKFLOW_CLOSED, ev.workflow_closed(f"plan_failed:{type(err).__name__}")
            )
            return self._failed_outcome(runtime)

        runtime.emit(EventKind.PLAN_PROPOSED, ev.plan_proposed(vplan))
        runtime.emit(
            EventKind.HANDOFF_RECORDED,
            ev.handoff_recorded(
                "planner", "supervisor", digest(plan_to_jsonable(plan)), True, self.clock.now_ms()
            ),
        )

        self.registry.begin_workflow()
        engine = WorkflowEngine(
            sink=runtime,
            vplan=vplan,
            registry=self.registry,
            policy=policy,
            clock=self.clock,
            conversation_id=runtime.conversation_id,
            artifacts_dir=artifacts_dir or self.config.artifacts_dir,
            hooks=self.hooks,
            token_box=self.token_box,
            lang=lang.value,
        )
        self.active_engines[runtime.conversation_id] = engine
        try:
            result = engine.run()
        finally:
            self.active_engines.pop(runtime.conversation_id, None)
            self.registry.end_workflow()

        if runtime.state.status is not WorkflowStatus.REPORTING:
            # cancelled mid-flight: the engine already closed the workflow
            return PromptOutcome(
                intent_class=IntentClass.TASK.value,
                final_status=runtime.state.status.value,
                workflow=result,
            )

        report = self._report_stage(
            runtime, vplan.plan, result, lang, artifacts_dir or self.config.artifacts_dir
        )
        runtime.emit(EventKind.WORKFLOW_CLOSED, ev.workflow_closed("completed"))
        final = WorkflowResult(
            final_status=runtime.state.status.value, results=result.results,
            report=report.to_jsonable() if report else None,
        )
        return PromptOutcome(
            intent_class=IntentClass.TASK.value,
            final_status=runtime.state.status.value,
            workflow=final,
            report=report,
        )

    def _report_stage(
        self, runtime, plan, result, lang: Lang, artifacts_dir: str | None = None
    ) -> Report | None:
        runtime.emit(
            EventKind.HANDOFF_RECORDED,
            ev.handoff_recorded(
                "supervisor",
                "reporter",
                digest([r.step_id for r in result.results]),
                True,
                self.clock.now_ms(),
            ),
        )
        try:
            results = self.hooks.run(HookStage.PRE_REPORT, list(result.results))
            report = compile_report(plan, results, lang)
        except (HookAbort, NothingToReport):
            return None
        self.hooks.run(HookStage.POST_REPORT, report)
        self._write_failure_log(report, artifacts_dir)
        summary = runtime.new_message(Role.REPORTER, report.executive_summary, lang)
        runtime.add_message(summary)
        runtime.emit(EventKind.REPORT_READY, ev.report_ready(report.to_jsonable()))
        return report

    def _write_failure_log(self, report: Report, artifacts_dir: str | None) -> None:
        """One JSON record per line in failures.log, next to the artifacts."""
        if not report.failure_log or artifacts_dir is None:
            return
        import json
        from pathlib import Path

        path = Path(artifacts_dir) / "failures.log"
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("a", encoding="utf-8") as fh:
            for entry in report.failure_log:
                fh.write(json.dumps(entry, sort_keys=True, ensure_ascii=False) + "\n")

    @staticmethod
    def _failed_outcome(runtime: ConversationRuntime) -> PromptOutcome:
        return PromptOutcome(
            intent_class=IntentClass.TASK.value, final_status=runtime.state.status.value
        )

    # -- live controls -------------------------------------------------------------

    def cancel(self, conversation_id: str) -> bool:
        engine = self.active_engines.get(conversation_id)
        if engine is None:
            return False
        engine.cancel()
        return True

    def submit_approval(self, conversation_id: str, action_digest: str, approved: bool) -> bool:
        engine = self.active_engines.get(conversation_id)
        if engine is None:
            return False
        engine.submit_approval(action_digest, approved)
        return True

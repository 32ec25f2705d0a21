"""Agent-facing contract: task payloads, outputs, and the invoke context."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Protocol

from ..clock import Clock


@dataclass(frozen=True)
class TaskPayload:
    conversation_id: str
    step_id: str
    description: str
    capability: str
    lang: str = "en"
    params: dict = field(default_factory=dict)
    artifacts_dir: str | None = None
    approval_token: str | None = None

    def to_jsonable(self) -> dict:
        return {
            "conversation_id": self.conversation_id,
            "step_id": self.step_id,
            "description": self.description,
            "capability": self.capability,
            "lang": self.lang,
            "params": self.params,
            "artifacts_dir": self.artifacts_dir,
            "approval_token": self.approval_token,
        }


@dataclass(frozen=True)
class AgentOutput:
    summary: str
    artifacts: tuple[str, ...] = ()
    data: dict = field(default_factory=dict)


class ApprovalRequired(Exception):
    """Raised by an agent when a destructive action needs a human decision.

    The supervisor parks the task, emits ApprovalRequested, and re-invokes
    with an approval token once the user decides.
    """

    def __init__(self, digest: str, description: str, kind: str):
        super().__init__(f"approval required for {kind}: {description}")
        self.digest = digest
        self.description = description
        self.kind = kind


class InvokeContext:
    """Runtime services handed to an agent for the duration of one invoke."""

    def __init__(
        self,
        grants,
        clock: Clock,
        heartbeat: Callable[[], None],
        deadline_ms: int | None = None,
    ):
        self.grants = grants
        self.clock = clock
        self._heartbeat = heartbeat
        self.deadline_ms = deadline_ms
        self._cancelled = False

    def heartbeat(self) -> None:
        self._heartbeat()

    def cancel(self) -> None:
        self._cancelled = True

    def cancelled(self) -> bool:
        return self._cancelled


class Agent(Protocol):
    """In-process plugin interface; one invoke at a time per instance."""

    def handle(self, task: TaskPayload, ctx: InvokeContext) -> AgentOutput: ...

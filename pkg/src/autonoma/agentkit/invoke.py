"""Bounded agent invocation: timeouts, output caps, panic containment.

invoke() never raises for agent misbehavior; it returns an InvokeOutcome the
supervisor folds into retry accounting. Grants are checked against the
manifest at call time and can only narrow, never widen.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Callable

from ..clock import Clock, WallClock
from .manifest import AgentManifest, PrivilegeGrants
from .types import Agent, AgentOutput, ApprovalRequired, InvokeContext, TaskPayload

OK = "ok"
PENDING_APPROVAL = "pending_approval"
FAILED = "failed"

CAUSE_TIMEOUT = "timeout"
CAUSE_PANIC = "agent_panic"


@dataclass(frozen=True)
class InvokeOutcome:
    status: str  # ok | pending_approval | failed
    summary: str = ""
    artifacts: tuple[str, ...] = ()
    data: dict = field(default_factory=dict)
    cause: str | None = None
    approval: dict | None = None  # {digest, description, kind}


def _truncate(text: str, limit: int) -> str:
    raw = text.encode("utf-8")
    if len(raw) <= limit:
        return text
    return raw[:limit].decode("utf-8", errors="ignore") + "…[truncated]"


def invoke(
    agent: Agent,
    manifest: AgentManifest,
    task: TaskPayload,
    grants: PrivilegeGrants,
    heartbeat: Callable[[], None],
    clock: Clock | None = None,
) -> InvokeOutcome:
    """Run one task on an in-process agent within its privilege envelope."""
    if not grants.is_not_wider_than(manifest.grants):
        raise ValueError(f"call-time grants wider than manifest grants for {manifest.id!r}")
    clock = clock or WallClock()
    ctx = InvokeContext(grants=grants, clock=clock, heartbeat=heartbeat)

    box: dict = {}

    def _run():
        try:
            box["output"] = agent.handle(task, ctx)
        except ApprovalRequired as approval:
            box["approval"] = approval
        except BaseException as err:  # noqa: BLE001 - panic containment
            box["panic"] = err

    worker = threading.Thread(target=_run, daemon=True, name=f"invoke-{manifest.id}")
    worker.start()
    worker.join(timeout=grants.max_runtime_ms / 1000.0)

    if worker.is_alive():
        ctx.cancel()  # cooperative agents notice; the thread is abandoned
        return InvokeOutcome(status=FAILED, cause=CAUSE_TIMEOUT)

    if "approval" in box:
        a: ApprovalRequired = box["approval"]
        return InvokeOutcome(
            status=PENDING_APPROVAL,
            approval={"digest": a.digest, "description": a.description, "kind": a.kind},
        )
    if "panic" in box:
        err = box["panic"]
        cause = getattr(err, "failure_cause", CAUSE_PANIC)
        return InvokeOutcome(status=FAILED, cause=cause, summary=_truncate(str(err), 512))

    output: AgentOutput = box["output"]
    return InvokeOutcome(
        status=OK,
        summary=_truncate(output.summary, grants.max_output_bytes),
        artifacts=output.artifacts,
        data=output.data,
    )

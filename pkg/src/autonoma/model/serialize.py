"""Canonical JSON serialization for every domain type.

Canonical rules: UTF-8, keys sorted, separators ``(",", ":")`` (no
insignificant whitespace), non-ASCII characters kept verbatim
(``ensure_ascii=False``). Digests throughout the system are lowercase hex
SHA-256 over these canonical bytes. Because encoding is canonical,
``dumps(loads(x)) == x`` holds for anything this module produced, which is
what the persistence layer's bit-exact round-trip rests on.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any

from .types import (
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


def canonical_dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def canonical_bytes(obj: Any) -> bytes:
    return canonical_dumps(obj).encode("utf-8")


def digest(obj: Any) -> str:
    """Lowercase hex SHA-256 of the canonical serialization."""
    return hashlib.sha256(canonical_bytes(obj)).hexdigest()


# --- per-type converters ----------------------------------------------------


def message_to_jsonable(m: Message) -> dict:
    return {
        "id": m.id,
        "role": m.role.value,
        "content": m.content,
        "lang": m.lang.value,
        "attachments": list(m.attachments),
        "timestamp": m.timestamp,
    }


def message_from_jsonable(d: dict) -> Message:
    return Message(
        id=d["id"],
        role=Role(d["role"]),
        content=d["content"],
        lang=Lang(d["lang"]),
        attachments=tuple(d["attachments"]),
        timestamp=d["timestamp"],
    )


def plan_step_to_jsonable(s: PlanStep) -> dict:
    out: dict = {
        "id": s.id,
        "description": s.description,
        "required_capability": s.required_capability,
        "depends_on": list(s.depends_on),
    }
    if s.agent_hint is not None:
        out["agent_hint"] = s.agent_hint
    return out


def plan_step_from_jsonable(d: dict) -> PlanStep:
    return PlanStep(
        id=d["id"],
        description=d["description"],
        required_capability=d["required_capability"],
        agent_hint=d.get("agent_hint"),
        depends_on=tuple(d["depends_on"]),
    )


def plan_to_jsonable(p: Plan) -> dict:
    return {
        "thought": p.thought,
        "steps": [plan_step_to_jsonable(s) for s in p.steps],
        "created_by": p.created_by,
    }


def plan_from_jsonable(d: dict) -> Plan:
    return Plan(
        thought=d["thought"],
        steps=tuple(plan_step_from_jsonable(s) for s in d["steps"]),
        created_by=d.get("created_by", "unknown"),
    )


def validated_plan_to_jsonable(vp: ValidatedPlan) -> dict:
    return {
        "plan": plan_to_jsonable(vp.plan),
        "levels": [list(l) for l in vp.levels],
    }


def validated_plan_from_jsonable(d: dict) -> ValidatedPlan:
    return ValidatedPlan(
        plan=plan_from_jsonable(d["plan"]),
        levels=tuple(tuple(l) for l in d["levels"]),
    )


def task_status_to_jsonable(t: TaskStatus) -> dict:
    return {
        "phase": t.phase.value,
        "attempts": t.attempts,
        "last_heartbeat": t.last_heartbeat,
    }


def task_status_from_jsonable(d: dict) -> TaskStatus:
    return TaskStatus(
        phase=TaskPhase(d["phase"]),
        attempts=d["attempts"],
        last_heartbeat=d["last_heartbeat"],
    )


def event_to_jsonable(e: WorkflowEvent) -> dict:
    return {
        "seq": e.seq,
        "kind": e.kind.value,
        "payload": e.payload,
        "timestamp": e.timestamp,
    }


def event_from_jsonable(d: dict) -> WorkflowEvent:
    return WorkflowEvent(
        seq=d["seq"],
        kind=EventKind(d["kind"]),
        payload=d["payload"],
        timestamp=d["timestamp"],
    )


def state_to_jsonable(s: WorkflowState) -> dict:
    return {
        "status": s.status.value,
        "task_states": {k: task_status_to_jsonable(v) for k, v in sorted(s.task_states.items())},
        "plan": validated_plan_to_jsonable(s.plan) if s.plan is not None else None,
        "seq": s.seq,
        "pending_approvals": sorted(s.pending_approvals),
    }


def state_from_jsonable(d: dict) -> WorkflowState:
    return WorkflowState(
        status=WorkflowStatus(d["status"]),
        task_states={k: task_status_from_jsonable(v) for k, v in d["task_states"].items()},
        plan=validated_plan_from_jsonable(d["plan"]) if d["plan"] is not None else None,
        seq=d["seq"],
        pending_approvals=frozenset(d["pending_approvals"]),
    )


def event_log_to_lines(events: list[WorkflowEvent]) -> str:
    """One canonical JSON object per line; the on-disk events.jsonl format."""
    return "".join(canonical_dumps(event_to_jsonable(e)) + "\n" for e in events)

"""Payload constructors for every event kind.

Everything that appends events goes through these helpers so the wire payload
shape is defined in exactly one place. Payloads are plain jsonable dicts.
"""

from __future__ import annotations

from .serialize import message_to_jsonable, validated_plan_to_jsonable
from .types import Message, ValidatedPlan


def prompt_received(message: Message) -> dict:
    # "urgency" is reserved: parsed as a contextual cue but consumed by no
    # scheduling policy yet.
    return {"message": message_to_jsonable(message), "urgency": None}


def intent_classified(
    intent_class: str, confidence: float, cues: list[str], reply: Message | None = None
) -> dict:
    payload: dict = {
        "intent": {"class": intent_class, "confidence": confidence, "cues": cues}
    }
    if reply is not None:
        payload["reply"] = message_to_jsonable(reply)
    return payload


def handoff_to_planner(conversation_id: str, context_digest: str) -> dict:
    return {"conversation_id": conversation_id, "context_digest": context_digest}


def plan_proposed(vplan: ValidatedPlan) -> dict:
    return {"plan": validated_plan_to_jsonable(vplan)}


def task_dispatched(step_id: str, agent_id: str, attempt: int) -> dict:
    return {"step_id": step_id, "agent_id": agent_id, "attempt": attempt}


def heartbeat(step_id: str, agent_id: str) -> dict:
    return {"step_id": step_id, "agent_id": agent_id}


def task_retried(step_id: str, cause: str, attempt: int, backoff_ms: int) -> dict:
    return {"step_id": step_id, "cause": cause, "attempt": attempt, "backoff_ms": backoff_ms}


def task_succeeded(
    step_id: str, agent_id: str, summary: str, artifacts: list[str], attempts: int, duration_ms: int
) -> dict:
    return {
        "step_id": step_id,
        "agent_id": agent_id,
        "summary": summary,
        "artifacts": artifacts,
        "attempts": attempts,
        "duration_ms": duration_ms,
    }


def task_failed(
    step_id: str,
    agent_id: str | None,
    cause: str,
    attempts: int,
    skipped: list[str] | None = None,
) -> dict:
    # "skipped" denormalizes the descendant closure this failure skips, so
    # stream clients can badge steps without re-deriving graph reachability;
    # the state machine fold recomputes it authoritatively and ignores this.
    return {
        "step_id": step_id,
        "agent_id": agent_id,
        "cause": cause,
        "attempts": attempts,
        "skipped": sorted(skipped or []),
    }


def handoff_recorded(
    from_role: str,
    to_role: str,
    payload_digest: str,
    accepted: bool,
    timestamp: int,
    step_id: str | None = None,
) -> dict:
    payload: dict = {
        "record": {
            "from_role": from_role,
            "to_role": to_role,
            "payload_digest": payload_digest,
            "accepted": accepted,
            "timestamp": timestamp,
        }
    }
    if step_id is not None:
        payload["step_id"] = step_id
    return payload


def approval_requested(step_id: str, digest: str, description: str, kind: str) -> dict:
    return {"step_id": step_id, "digest": digest, "description": description, "kind": kind}


def approval_resolved(digest: str, approved: bool, step_id: str | None = None) -> dict:
    return {"digest": digest, "approved": approved, "step_id": step_id}


def report_ready(report: dict) -> dict:
    return {"report": report}


def workflow_closed(reason: str, skipped: list[str] | None = None) -> dict:
    return {"reason": reason, "skipped": sorted(skipped or [])}

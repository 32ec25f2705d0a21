"""Plan generation: provider call, strict schema enforcement, one repair round.

The plan wire schema is a top-level object {thought, steps}; each step is
{id, description, required_capability, agent_hint?, depends_on}. Parsing is
strict — unknown fields are rejected — and every violation carries a
machine-readable path that is fed verbatim into the repair prompt.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .clock import Clock, WallClock
from .errors import PlanParseError, PlanValidationError, SchemaViolation
from .model import Message, Plan, PlanStep, validate_plan
from .provider import CompletionRequest, ProviderRouter
from .search import SearchTool


@dataclass(frozen=True)
class ContextNotes:
    snippets: tuple[dict, ...]  # {"source": id, "text": str}
    gathered_at: int

    def __post_init__(self) -> None:
        for s in self.snippets:
            if not s.get("source"):
                raise ValueError("every snippet must cite a source identifier")


@dataclass(frozen=True)
class PlanRequest:
    request_text: str
    context: tuple[Message, ...] = ()
    pregathered: ContextNotes | None = None
    capability_vocabulary: frozenset = frozenset()


_STEP_REQUIRED = {"id", "description", "required_capability", "depends_on"}
_STEP_ALLOWED = _STEP_REQUIRED | {"agent_hint"}
_FENCE = re.compile(r"^\s*```(?:json)?\s*(.*?)\s*```\s*$", re.DOTALL)


def parse_plan(raw: str, vocabulary: set[str]) -> Plan:
    """Strict parse of the plan JSON schema.

    A single surrounding code fence is tolerated (models love fences); the
    JSON inside is held to the schema exactly.
    """
    import json

    m = _FENCE.match(raw)
    if m:
        raw = m.group(1)

    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as err:
        raise SchemaViolation("/", f"not valid JSON: {err.msg} at char {err.pos}") from None

    if not isinstance(doc, dict):
        raise SchemaViolation("/", "top level must be an object")
    unknown = set(doc) - {"thought", "steps"}
    if unknown:
        raise SchemaViolation(f"/{sorted(unknown)[0]}", "unknown field")
    if "thought" not in doc:
        raise SchemaViolation("/thought", "missing required field")
    if not isinstance(doc["thought"], str) or not doc["thought"].strip():
        raise SchemaViolation("/thought", "must be a non-empty string")
    if "steps" not in doc:
        raise SchemaViolation("/steps", "missing required field")
    if not isinstance(doc["steps"], list) or not doc["steps"]:
        raise SchemaViolation("/steps", "must be a non-empty array")

    declared = set()
    for i, s in enumerate(doc["steps"]):
        if isinstance(s, dict) and isinstance(s.get("id"), str):
            declared.add(s["id"])

    steps: list[PlanStep] = []
    for i, s in enumerate(doc["steps"]):
        path = f"/steps/{i}"
        if not isinstance(s, dict):
            raise SchemaViolation(path, "step must be an object")
        unknown = set(s) - _STEP_ALLOWED
        if unknown:
            raise SchemaViolation(f"{path}/{sorted(unknown)[0]}", "unknown field")
        missing = _STEP_REQUIRED - set(s)
        if missing:
            raise SchemaViolation(f"{path}/{sorted(missing)[0]}", "missing required field")
        for key in ("id", "description", "required_capability"):
            if not isinstance(s[key], str) or not s[key]:
                raise SchemaViolation(f"{path}/{key}", "must be a non-empty string")
        if "agent_hint" in s and not isinstance(s["agent_hint"], str):
            raise SchemaViolation(f"{path}/agent_hint", "must be a string")
        if not isinstance(s["depends_on"], list) or any(
            not isinstance(d, str) for d in s["depends_on"]
        ):
            raise SchemaViolation(f"{path}/depends_on", "must be an array of step ids")
        for dep in s["depends_on"]:
            if dep not in declared:
                raise SchemaViolation(f"{path}/depends_on", f"references undeclared id {dep!r}")
        if vocabulary and s["required_capability"] not in vocabulary:
            raise SchemaViolation(
                f"{path}/required_capability",
                f"{s['required_capability']!r} not in {sorted(vocabulary)}",
            )
        steps.append(
            PlanStep(
                id=s["id"],
                description=s["description"],
                required_capability=s["required_capability"],
                agent_hint=s.get("agent_hint"),
                depends_on=tuple(s["depends_on"]),
            )
        )

    return Plan(thought=doc["thought"], steps=tuple(steps))


def pregather(
    request_text: str,
    research_tools: list[SearchTool],
    budget: int,
    clock: Clock | None = None,
) -> ContextNotes:
    """Optional plan-time research: at most ``budget`` tool invocations.

    Tool failures yield fewer snippets; they never abort planning.
    """
    clock = clock or WallClock()
    snippets: list[dict] = []
    calls = 0
    for tool in research_tools:
        if calls >= budget:
            break
        calls += 1
        try:
            hits = tool.search(request_text, limit=2)
        except Exception:
            continue
        for hit in hits:
            snippets.append({"source": f"{tool.name}:{hit.source_id}", "text": hit.text})
    return ContextNotes(snippets=tuple(snippets), gathered_at=clock.now_ms())


_SYSTEM_TEMPLATE = (
    "You design executable workflows. Restate the user's request as a short "
    "thought, then decompose it into steps. Available capabilities: {caps}. "
    "Respond with a single JSON object {{\"thought\": string, \"steps\": "
    "[{{\"id\", \"description\", \"required_capability\", \"agent_hint\"?, "
    "\"depends_on\": [earlier step ids]}}]}} and nothing else."
)


class Planner:
    """Stateless; one in-flight plan per conversation is enforced upstream."""

    def __init__(
        self,
        provider: ProviderRouter,
        repair_template_path: str | Path | None = None,
        clock: Clock | None = None,
    ):
        self.provider = provider
        self.clock = clock or WallClock()
        if repair_template_path is not None:
            self.repair_template = Path(repair_template_path).read_text(encoding="utf-8")
        else:
            self.repair_template = (
                resources.files("autonoma.planner_data")
                .joinpath("repair_prompt.txt")
                .read_text("utf-8")
            )

    def acknowledge_handoff(self) -> bool:
        """Dispatch ack for the coordinator's handoff; stubs may refuse."""
        return True

    def make_plan(self, req: PlanRequest, provider: ProviderRouter | None = None) -> Plan:
        """Generate a plan that passes validate_plan; one repair round allowed.

        Total provider calls are 1 (clean) or 2 (repair). A second bad
        document raises PlanParseError.
        """
        if not req.capability_vocabulary:
            raise ValueError("capability vocabulary must be non-empty")
        provider = provider or self.provider

        messages = self._prompt_messages(req)
        raw = provider.complete(
            CompletionRequest(role_context="planner", messages=messages)
        ).text
        try:
            plan = self._parse_and_validate(raw, req)
        except (SchemaViolation, PlanValidationError) as err:
            path = getattr(err, "path", "/")
            repair = self.repair_template.format(raw=raw, error_path=f"{path}: {err}")
            raw2 = provider.complete(
                CompletionRequest(
                    role_context="planner", messages=messages + (("user", repair),)
                )
            ).text
            try:
                plan = self._parse_and_validate(raw2, req)
            except (SchemaViolation, PlanValidationError) as err2:
                raise PlanParseError(f"repair round failed: {err2}") from err2
        return plan

    def _parse_and_validate(self, raw: str, req: PlanRequest) -> Plan:
        vocabulary = set(req.capability_vocabulary)
        plan = parse_plan(raw, vocabulary)
        plan = Plan(thought=plan.thought, steps=plan.steps, created_by="planner")
        validate_plan(plan, vocabulary)
        return plan

    def _prompt_messages(self, req: PlanRequest) -> tuple[tuple[str, str], ...]:
        system = _SYSTEM_TEMPLATE.format(caps=", ".join(sorted(req.capability_vocabulary)))
        parts = [req.request_text]
        if req.context:
            history = "\n".join(f"{m.role.value}: {m.content}" for m in req.context[-6:])
            parts.append(f"Conversation so far:\n{history}")
        if req.pregathered and req.pregathered.snippets:
            notes = "\n".join(
                f"[{s['source']}] {s['text']}" for s in req.pregathered.snippets
            )
            parts.append(f"Background notes:\n{notes}")
        return (("system", system), ("user", "\n\n".join(parts)))

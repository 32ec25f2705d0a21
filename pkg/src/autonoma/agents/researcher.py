"""Researcher agent: sourced findings through the SearchTool interface."""

from __future__ import annotations

from dataclasses import dataclass

from ..clock import Clock, WallClock
from ..errors import AllToolsFailed, InvalidQuery
from ..agentkit import AgentOutput, InvokeContext, TaskPayload
from ..search import SearchTool


@dataclass(frozen=True)
class Findings:
    query: str
    items: tuple[dict, ...]  # {"claim": str, "source_id": str, "retrieved_at": int}

    def __post_init__(self) -> None:
        for item in self.items:
            if not item.get("source_id"):
                raise ValueError("every finding must carry a source id")


def research(
    query: str,
    tools: list[SearchTool],
    budget: int,
    clock: Clock | None = None,
) -> Findings:
    """At most ``budget`` tool calls; results only via the SearchTool interface.

    Raises InvalidQuery for an empty query and AllToolsFailed when every call
    within the budget errored.
    """
    if not query or not query.strip():
        raise InvalidQuery("empty research query")
    if budget < 1:
        raise InvalidQuery("research budget must be >= 1")
    clock = clock or WallClock()

    items: list[dict] = []
    calls = 0
    successes = 0
    for tool in tools:
        if calls >= budget:
            break
        calls += 1
        try:
            hits = tool.search(query, limit=5)
        except Exception:
            continue
        successes += 1
        now = clock.now_ms()
        for hit in hits:
            items.append(
                {
                    "claim": f"{hit.title}: {hit.text}",
                    "source_id": f"{tool.name}:{hit.source_id}",
                    "retrieved_at": now,
                }
            )
    if calls and not successes:
        raise AllToolsFailed(f"all {calls} tool calls within budget failed")
    return Findings(query=query, items=tuple(items))


class ResearcherAgent:
    def __init__(self, tools: list[SearchTool], default_budget: int = 3,
                 clock: Clock | None = None):
        self.tools = list(tools)
        self.default_budget = default_budget
        self.clock = clock or WallClock()

    def handle(self, task: TaskPayload, ctx: InvokeContext) -> AgentOutput:
        ctx.heartbeat()
        budget = int(task.params.get("budget", self.default_budget))
        try:
            findings = research(task.description, self.tools, budget, clock=self.clock)
        except (InvalidQuery, AllToolsFailed) as err:
            err.failure_cause = type(err).__name__.lower()
            raise
        summary = f"{len(findings.items)} sourced findings for: {findings.query}"
        return AgentOutput(
            summary=summary,
            data={"query": findings.query, "items": list(findings.items)},
        )

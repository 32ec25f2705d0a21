"""Simulated agents for logical-clock execution.

A simulated agent doesn't run code; it declares, per attempt, how the attempt
behaves on the logical timeline (ack delay, heartbeat cadence, duration,
outcome). The engine turns the declaration into scheduled timers, which is
what makes 500-workflow benchmarks complete in wall-clock seconds and makes
two same-seed runs byte-identical.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol

from ..model import PlanStep


@dataclass(frozen=True)
class SimBehavior:
    """One attempt on the logical timeline.

    ack_delay_ms None means the agent never acknowledges the dispatch.
    stall=True means: acknowledge, emit ``heartbeats_before_stall`` beats,
    then go silent (no result ever arrives; the health check must fire).
    """

    ack_delay_ms: int | None = 0
    duration_ms: int = 10
    heartbeat_every_ms: int | None = None
    outcome: str = "ok"  # ok | failed
    cause: str | None = None
    summary: str = "simulated"
    stall: bool = False
    heartbeats_before_stall: int = 0


class SimulatedAgent(Protocol):
    def plan_attempt(self, step: PlanStep, attempt: int) -> SimBehavior: ...


class ScriptedSimAgent:
    """Fixed behavior sequence per step; repeats the last entry when exhausted."""

    def __init__(self, behaviors: dict[str, list[SimBehavior]], default: SimBehavior | None = None):
        self.behaviors = {k: list(v) for k, v in behaviors.items()}
        self.default = default or SimBehavior()

    def plan_attempt(self, step: PlanStep, attempt: int) -> SimBehavior:
        seq = self.behaviors.get(step.id)
        if not seq:
            return self.default
        return seq[min(attempt - 1, len(seq) - 1)]


def flaky(failures: int, duration_ms: int = 10, cause: str = "error") -> list[SimBehavior]:
    """``failures`` failing attempts, then success."""
    return [SimBehavior(duration_ms=duration_ms, outcome="failed", cause=cause)] * failures + [
        SimBehavior(duration_ms=duration_ms)
    ]

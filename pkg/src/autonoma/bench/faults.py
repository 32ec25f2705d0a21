"""Fault injection for synthetic workloads.

Faults are drawn per attempt from an RNG derived deterministically from
(seed, workflow index), so a given seed always injects the identical fault
sequence regardless of harness parallelism. A stall is counted exactly like
a failed attempt (uniform retry path), which keeps the analytics closed-form:

    P(attempt bad) = stall + (1 - stall) * fail
    P(step completes) = 1 - P(bad)^(retry_limit + 1)
    P(chain-k workflow completes) = P(step completes)^k
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass

from ..model import PlanStep
from ..supervisor.simulate import SimBehavior


@dataclass(frozen=True)
class FaultModel:
    per_attempt_failure_prob: float = 0.0
    stall_prob: float = 0.0
    latency_kind: str = "fixed"  # fixed | uniform
    latency_lo_ms: int = 10
    latency_hi_ms: int = 10
    seed: int = 0

    def __post_init__(self) -> None:
        for p in (self.per_attempt_failure_prob, self.stall_prob):
            if not 0.0 <= p <= 1.0:
                raise ValueError("probabilities must be in [0, 1]")
        if self.latency_kind not in ("fixed", "uniform"):
            raise ValueError(f"unknown latency kind {self.latency_kind!r}")

    def attempt_bad_prob(self) -> float:
        s, f = self.stall_prob, self.per_attempt_failure_prob
        return s + (1.0 - s) * f

    def expected_completion(self, steps: int, retry_limit: int) -> float:
        q = self.attempt_bad_prob()
        return (1.0 - q ** (retry_limit + 1)) ** steps


def derive_rng(seed: int, index: int) -> random.Random:
    """Process-stable derivation (no reliance on Python hash randomization)."""
    material = hashlib.sha256(f"{seed}:{index}".encode()).digest()
    return random.Random(int.from_bytes(material[:8], "big"))


class FaultedSimAgent:
    """Simulated worker whose attempts follow the fault model."""

    def __init__(self, model: FaultModel, workflow_index: int):
        self.model = model
        self.rng = derive_rng(model.seed, workflow_index)

    def _latency(self) -> int:
        if self.model.latency_kind == "fixed":
            return self.model.latency_lo_ms
        return self.rng.randint(self.model.latency_lo_ms, self.model.latency_hi_ms)

    def plan_attempt(self, step: PlanStep, attempt: int) -> SimBehavior:
        duration = self._latency()
        if self.rng.random() < self.model.stall_prob:
            return SimBehavior(stall=True, heartbeats_before_stall=0)
        if self.rng.random() < self.model.per_attempt_failure_prob:
            return SimBehavior(duration_ms=duration, outcome="failed", cause="injected")
        return SimBehavior(duration_ms=duration, summary=f"{step.id} ok")

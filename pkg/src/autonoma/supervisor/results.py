"""Execution policy and per-step result records."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class ExecutionPolicy:
    """Retry, backoff, health-check, and concurrency bounds for one workflow.

    Backoff is deterministic exponential (initial * multiplier^(attempt-1))
    with no jitter so event logs replay identically; jitter_ms adds a random
    component only when explicitly configured.
    """

    retry_limit: int = 2
    backoff_initial_ms: int = 250
    backoff_multiplier: float = 2.0
    ack_timeout_ms: int = 2000
    heartbeat_interval_ms: int = 5000
    missed_heartbeats_to_stall: int = 3
    max_concurrency: int = 4
    per_agent_concurrency: int = 1
    jitter_ms: int = 0

    def __post_init__(self) -> None:
        if self.retry_limit < 0 or self.max_concurrency < 1 or self.per_agent_concurrency < 1:
            raise ValueError("invalid execution policy bounds")

    def backoff_for(self, failed_attempts: int) -> int:
        return int(self.backoff_initial_ms * self.backoff_multiplier ** (failed_attempts - 1))

    def stall_threshold_ms(self) -> int:
        return self.missed_heartbeats_to_stall * self.heartbeat_interval_ms

    def to_jsonable(self) -> dict:
        return {
            "retry_limit": self.retry_limit,
            "backoff_initial_ms": self.backoff_initial_ms,
            "backoff_multiplier": self.backoff_multiplier,
            "ack_timeout_ms": self.ack_timeout_ms,
            "heartbeat_interval_ms": self.heartbeat_interval_ms,
            "missed_heartbeats_to_stall": self.missed_heartbeats_to_stall,
            "max_concurrency": self.max_concurrency,
            "per_agent_concurrency": self.per_agent_concurrency,
            "jitter_ms": self.jitter_ms,
        }

    @classmethod
    def from_jsonable(cls, d: dict) -> "ExecutionPolicy":
        return cls(**{k: d[k] for k in cls().to_jsonable() if k in d})


SUCCEEDED = "succeeded"
FAILED = "failed"
SKIPPED = "skipped"


@dataclass(frozen=True)
class TaskResult:
    """One step's final execution record."""

    step_id: str
    outcome: str  # succeeded | failed | skipped
    summary: str = ""
    artifacts: tuple[str, ...] = ()
    data: dict = field(default_factory=dict)
    cause: str | None = None
    attempts: int = 0
    duration_ms: int = 0
    agent_id: str | None = None


@dataclass(frozen=True)
class WorkflowResult:
    final_status: str
    results: tuple[TaskResult, ...]
    report: dict | None = None

    def result_for(self, step_id: str) -> TaskResult:
        for r in self.results:
            if r.step_id == step_id:
                return r
        raise KeyError(step_id)

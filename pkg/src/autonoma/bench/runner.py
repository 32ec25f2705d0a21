"""Benchmark runner: synthetic workflows through the full pipeline.

Every workflow runs the real coordinator -> planner -> supervisor -> reporter
path with a scripted provider and fault-injected simulated agents on a
logical clock. Metrics are computed from the emitted event logs alone, so
recomputing them from persisted logs reproduces identical numbers.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from ..agentkit import AgentManifest, AgentRegistry, PrivilegeGrants
from ..clock import LogicalClock
from ..coordinator import Coordinator
from ..model import EventKind, WorkflowEvent, replay
from ..planner import Planner
from ..provider import ProviderRouter, ProviderScript, ScriptedBackend
from ..runtime import ConversationRuntime, PipelineConfig, WorkflowPipeline
from ..supervisor import ExecutionPolicy
from .faults import FaultedSimAgent, FaultModel
from .workload import CAPABILITY, WorkflowSpec


@dataclass(frozen=True)
class Metrics:
    task_completion_rate: float
    handoff_success_rate: float
    latency_p50_ms: int
    latency_p95_ms: int
    workflows_total: int
    workflows_completed: int
    handoffs_total: int
    handoffs_accepted: int
    retries_total: int
    events_total: int
    filter_fuzz_denied: int | None = None
    filter_fuzz_total: int | None = None

    def to_jsonable(self) -> dict:
        return {
            "task_completion_rate": self.task_completion_rate,
            "handoff_success_rate": self.handoff_success_rate,
            "latency_p50_ms": self.latency_p50_ms,
            "latency_p95_ms": self.latency_p95_ms,
            "workflows_total": self.workflows_total,
            "workflows_completed": self.workflows_completed,
            "handoffs_total": self.handoffs_total,
            "handoffs_accepted": self.handoffs_accepted,
            "retries_total": self.retries_total,
            "events_total": self.events_total,
            "filter_fuzz_denied": self.filter_fuzz_denied,
            "filter_fuzz_total": self.filter_fuzz_total,
        }

    @classmethod
    def from_jsonable(cls, d: dict) -> "Metrics":
        return cls(**{k: d[k] for k in cls(0, 0, 0, 0, 0, 0, 0, 0, 0, 0).to_jsonable()})


def _percentile(sorted_values: list[int], p: float) -> int:
    """Nearest-rank percentile; deterministic and simple."""
    if not sorted_values:
        return 0
    import math

    rank = max(1, math.ceil(p * len(sorted_values)))
    return sorted_values[rank - 1]


def run_one(spec: WorkflowSpec, model: FaultModel, policy: ExecutionPolicy) -> list[WorkflowEvent]:
    """One synthetic workflow end to end; returns its event log."""
    clock = LogicalClock()
    backend = ScriptedBackend(ProviderScript.of("task", spec.plan_json()))
    router = ProviderRouter.single(backend)
    registry = AgentRegistry()
    registry.register(
        AgentManifest(
            id="sim_worker",
            display_name="Synthetic worker",
            capabilities=frozenset({CAPABILITY}),
            grants=PrivilegeGrants(),
        ),
        FaultedSimAgent(model, spec.index),
    )
    pipeline = WorkflowPipeline(
        coordinator=Coordinator(router, clock=clock),
        planner=Planner(router, clock=clock),
        registry=registry,
        config=PipelineConfig(policy=policy),
        clock=clock,
    )
    runtime = ConversationRuntime("f" * 32, clock=clock)
    pipeline.handle_prompt(runtime, f"run synthetic workflow {spec.index}")
    return runtime.events


def metrics_from_logs(
    logs: list[list[WorkflowEvent]],
    filter_fuzz: tuple[int, int] | None = None,
) -> Metrics:
    """Pure function of the event logs (no privileged engine counters)."""
    completed = 0
    handoffs_total = 0
    handoffs_accepted = 0
    retries = 0
    events_total = 0
    latencies: list[int] = []
    for log in logs:
        events_total += len(log)
        final = replay(log)
        if final.status.value == "Complete":
            completed += 1
        latencies.append(log[-1].timestamp - log[0].timestamp if log else 0)
        for event in log:
            if event.kind is EventKind.HANDOFF_RECORDED:
                handoffs_total += 1
                if event.payload["record"]["accepted"]:
                    handoffs_accepted += 1
            elif event.kind is EventKind.TASK_RETRIED:
                retries += 1
    latencies.sort()
    n = len(logs)
    denied, fuzz_total = (filter_fuzz if filter_fuzz else (None, None))
    return Metrics(
        task_completion_rate=completed / n if n else 0.0,
        handoff_success_rate=handoffs_accepted / handoffs_total if handoffs_total else 1.0,
        latency_p50_ms=_percentile(latencies, 0.50),
        latency_p95_ms=_percentile(latencies, 0.95),
        workflows_total=n,
        workflows_completed=completed,
        handoffs_total=handoffs_total,
        handoffs_accepted=handoffs_accepted,
        retries_total=retries,
        events_total=events_total,
        filter_fuzz_denied=denied,
        filter_fuzz_total=fuzz_total,
    )


def run_benchmark(
    workload: list[WorkflowSpec],
    model: FaultModel,
    policy: ExecutionPolicy,
    workers: int = 1,
    with_filter_fuzz: bool = False,
) -> tuple[Metrics, list[list[WorkflowEvent]]]:
    if workers <= 1:
        logs = [run_one(spec, model, policy) for spec in workload]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            logs = list(pool.map(lambda s: run_one(s, model, policy), workload))
    fuzz = None
    if with_filter_fuzz:
        fuzz = run_filter_fuzz(model.seed)
    return metrics_from_logs(logs, filter_fuzz=fuzz), logs


def _outside_default_lan(a: int, b: int, c: int, d: int) -> bool:
    """Octet arithmetic for the default allowlist, independent of ip_filter
    (and of the ipaddress module) so the fuzz has a real oracle."""
    if a == 10 or a == 127:
        return False
    if a == 192 and b == 168:
        return False
    if a == 172 and 16 <= b <= 31:
        return False
    return True


def run_filter_fuzz(seed: int, count: int = 10_000) -> tuple[int, int]:
    """(denied, total) over random non-allowlisted addresses; mirrors the
    security-validation row of the metric table."""
    from ..gateway.ipfilter import ALLOW, DEFAULT_ALLOWLIST, ip_filter, parse_allowlist

    from .faults import derive_rng

    blocks = parse_allowlist(list(DEFAULT_ALLOWLIST))
    rng = derive_rng(seed, 0xF117E4)
    denied = 0
    produced = 0
    while produced < count:
        octets = tuple(rng.randint(0, 255) for _ in range(4))
        if not _outside_default_lan(*octets):
            continue  # only fuzz non-allowlisted sources
        produced += 1
        if ip_filter(".".join(map(str, octets)), blocks) != ALLOW:
            denied += 1
    return denied, produced

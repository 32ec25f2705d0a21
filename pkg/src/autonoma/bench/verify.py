"""Analytic-vs-measured verification grid.

For each (failure prob, retry limit, shape) cell, the measured completion
rate over n workflows must lie within the 99% binomial confidence interval
of the closed-form expectation (1 - q^(r+1))^k. Exits nonzero on any
deviation, which is what `bench verify` gates on.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from ..supervisor import ExecutionPolicy
from .faults import FaultModel
from .runner import run_benchmark
from .workload import generate_workload

Z99 = 2.5758293035489004

GRID_FAILS = (0.0, 0.1, 0.3)
GRID_RETRIES = (0, 1, 2)
GRID_SHAPES = ("single", "chain-3")


def steps_in_shape(shape: str) -> int:
    if shape == "single":
        return 1
    m = re.match(r"^chain-(\d+)$", shape)
    if m:
        return int(m.group(1))
    raise ValueError(f"verify grid supports single/chain-k, got {shape!r}")


@dataclass(frozen=True)
class CellResult:
    fail: float
    retries: int
    shape: str
    expected: float
    measured: float
    half_width: float
    ok: bool

    def describe(self) -> str:
        mark = "ok " if self.ok else "FAIL"
        return (
            f"[{mark}] f={self.fail:<4} r={self.retries} {self.shape:<8} "
            f"expected={self.expected:.4f} measured={self.measured:.4f} "
            f"tolerance=±{self.half_width:.4f}"
        )


def check_cell(fail: float, retries: int, shape: str, n: int, seed: int) -> CellResult:
    model = FaultModel(per_attempt_failure_prob=fail, seed=seed)
    k = steps_in_shape(shape)
    expected = model.expected_completion(k, retries)
    policy = ExecutionPolicy(retry_limit=retries)
    workload = generate_workload(seed, n, shape)
    metrics, _ = run_benchmark(workload, model, policy)
    half_width = Z99 * math.sqrt(expected * (1.0 - expected) / n)
    ok = abs(metrics.task_completion_rate - expected) <= half_width
    return CellResult(
        fail=fail,
        retries=retries,
        shape=shape,
        expected=expected,
        measured=metrics.task_completion_rate,
        half_width=half_width,
        ok=ok,
    )


def run_verify(n: int = 500, seed: int = 42) -> tuple[bool, list[CellResult]]:
    results = []
    for fail in GRID_FAILS:
        for retries in GRID_RETRIES:
            for shape in GRID_SHAPES:
                results.append(check_cell(fail, retries, shape, n, seed))
    return all(r.ok for r in results), results

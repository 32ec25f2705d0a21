"""Deterministic synthetic workload generation."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from ..model import Plan, PlanStep, validate_plan
from .faults import derive_rng

CAPABILITY = "synthetic"

_CHAIN = re.compile(r"^chain-(\d+)$")

SHAPES = ("single", "diamond", "random", "mixed")  # plus chain-<k>


@dataclass(frozen=True)
class WorkflowSpec:
    index: int
    shape: str
    step_ids: tuple[str, ...]
    deps: dict  # step id -> tuple of deps

    def plan(self) -> Plan:
        steps = tuple(
            PlanStep(
                id=sid,
                description=f"synthetic step {sid}",
                required_capability=CAPABILITY,
                depends_on=tuple(self.deps[sid]),
            )
            for sid in self.step_ids
        )
        return Plan(thought=f"synthetic workflow {self.index} ({self.shape})", steps=steps)

    def plan_json(self) -> str:
        doc = {
            "thought": f"synthetic workflow {self.index} ({self.shape})",
            "steps": [
                {
                    "id": sid,
                    "description": f"synthetic step {sid}",
                    "required_capability": CAPABILITY,
                    "depends_on": sorted(self.deps[sid]),
                }
                for sid in self.step_ids
            ],
        }
        return json.dumps(doc)


def _shape_spec(index: int, shape: str, rng) -> WorkflowSpec:
    if shape == "single":
        return WorkflowSpec(index, shape, ("s1",), {"s1": ()})
    m = _CHAIN.match(shape)
    if m:
        k = int(m.group(1))
        ids = tuple(f"s{i + 1}" for i in range(k))
        deps = {ids[0]: ()}
        for prev, cur in zip(ids, ids[1:]):
            deps[cur] = (prev,)
        return WorkflowSpec(index, shape, ids, deps)
    if shape == "diamond":
        return WorkflowSpec(
            index,
            shape,
            ("s1", "s2", "s3", "s4"),
            {"s1": (), "s2": ("s1",), "s3": ("s1",), "s4": ("s2", "s3")},
        )
    if shape == "random":
        n = rng.randint(1, 8)
        ids = tuple(f"s{i + 1}" for i in range(n))
        deps = {}
        for i, sid in enumerate(ids):
            deps[sid] = tuple(e for e in ids[:i] if rng.random() < 0.4)
        return WorkflowSpec(index, shape, ids, deps)
    raise ValueError(f"unknown workload shape {shape!r}")


def generate_workload(seed: int, n: int, shape: str) -> list[WorkflowSpec]:
    """n workflow specs, identical for identical (seed, n, shape)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    specs = []
    for i in range(n):
        rng = derive_rng(seed, i)
        chosen = shape
        if shape == "mixed":
            chosen = rng.choice(["single", "chain-3", "diamond", "random"])
        specs.append(_shape_spec(i, chosen, rng))
    for spec in specs:  # every generated plan must validate
        validate_plan(spec.plan(), {CAPABILITY})
    return specs

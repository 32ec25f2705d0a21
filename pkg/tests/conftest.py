from __future__ import annotations

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from autonoma.model import Plan, PlanStep


def make_plan(deps: dict, order: list[str] | None = None, capability: str = "work") -> Plan:
    """Build a Plan from a {step: deps} map, declaration order given or sorted."""
    ids = order if order is not None else sorted(deps)
    steps = tuple(
        PlanStep(
            id=sid,
            description=f"do {sid}",
            required_capability=capability,
            depends_on=tuple(deps[sid]),
        )
        for sid in ids
    )
    return Plan(thought="test plan", steps=steps, created_by="test")

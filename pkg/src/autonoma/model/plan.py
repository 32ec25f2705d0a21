"""Plan validation and dependency layering."""

from __future__ import annotations

from ..errors import CyclicDependency, DuplicateStepId, EmptyPlan, UnknownCapability
from .types import Plan, ValidatedPlan


def validate_plan(plan: Plan, registry_capabilities: set[str]) -> ValidatedPlan:
    """Check all plan invariants and annotate the plan with dependency levels.

    Invariants enforced, in order: steps non-empty; step ids unique; every
    required capability is registered; every dependency references an
    earlier-declared step id. The last check is the cycle check — a cycle
    necessarily contains a dependency on a not-yet-declared step, so any
    violation (true cycle or forward reference) raises CyclicDependency.
    """
    if not plan.steps:
        raise EmptyPlan("plan has no steps")

    seen: set[str] = set()
    for step in plan.steps:
        if step.id in seen:
            raise DuplicateStepId(f"step id {step.id!r} declared twice")
        seen.add(step.id)

    for step in plan.steps:
        if step.required_capability not in registry_capabilities:
            raise UnknownCapability(
                f"step {step.id!r} requires {step.required_capability!r}, "
                f"registered: {sorted(registry_capabilities)}"
            )

    declared: set[str] = set()
    for step in plan.steps:
        for dep in step.depends_on:
            if dep not in declared:
                raise CyclicDependency(
                    f"step {step.id!r} depends on {dep!r} which is not declared "
                    "earlier (cycle or forward reference)"
                )
        declared.add(step.id)

    return ValidatedPlan(plan=plan, levels=_levels(plan))


def _levels(plan: Plan) -> tuple[tuple[str, ...], ...]:
    """Longest-path level per step; steps within a level keep declaration order."""
    level: dict[str, int] = {}
    for step in plan.steps:  # declaration order is a topological order
        level[step.id] = 1 + max((level[d] for d in step.depends_on), default=-1)
    depth = max(level.values()) + 1
    out: list[list[str]] = [[] for _ in range(depth)]
    for step in plan.steps:
        out[level[step.id]].append(step.id)
    return tuple(tuple(l) for l in out)


def dependency_levels(plan: ValidatedPlan) -> list[list[str]]:
    """Levels of a validated plan, as mutable lists for callers that reorder."""
    return [list(l) for l in plan.levels]


def descendants(plan: Plan, step_id: str) -> set[str]:
    """All steps that transitively depend on ``step_id``."""
    forward: dict[str, set[str]] = {s.id: set() for s in plan.steps}
    for s in plan.steps:
        for dep in s.depends_on:
            forward[dep].add(s.id)
    out: set[str] = set()
    stack = [step_id]
    while stack:
        for child in forward[stack.pop()]:
            if child not in out:
                out.add(child)
                stack.append(child)
    return out

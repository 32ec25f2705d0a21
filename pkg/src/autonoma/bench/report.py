"""Metric rendering: plain-text table and JSON, with reference figures.

The reference column carries the evaluation figures published for the
original live-model deployment. They depend on live model behavior and are
printed for context only, never asserted by the harness.
"""

from __future__ import annotations

import json

from .runner import Metrics

REFERENCE = {
    "task_completion": "97% over 500 test cases",
    "latency": "1-2 s (network-dependent, model-dominated)",
    "handoffs": "98% successful inter-agent handoffs",
    "language_switch": "100% without page reloads",
    "security": "0 breaches in penetration tests",
}

_REFERENCE_NOTE = (
    "reference column: figures reported for the original live-model deployment; "
    "shown for context, not reproduced by this offline harness"
)


def render_table(metrics: Metrics) -> str:
    if metrics.filter_fuzz_total:
        security = (
            f"{metrics.filter_fuzz_denied}/{metrics.filter_fuzz_total} "
            "non-allowlisted addresses denied"
        )
    else:
        security = "n/a (fuzz not run)"
    rows = [
        (
            "Task completion rate",
            f"{metrics.task_completion_rate * 100:.2f}% "
            f"({metrics.workflows_completed}/{metrics.workflows_total})",
            REFERENCE["task_completion"],
        ),
        (
            "Latency (logical)",
            f"p50 {metrics.latency_p50_ms} ms / p95 {metrics.latency_p95_ms} ms",
            REFERENCE["latency"],
        ),
        (
            "Handoff success rate",
            f"{metrics.handoff_success_rate * 100:.2f}% "
            f"({metrics.handoffs_accepted}/{metrics.handoffs_total})",
            REFERENCE["handoffs"],
        ),
        ("Language switch", "n/a (headless run)", REFERENCE["language_switch"]),
        ("Security filter", security, REFERENCE["security"]),
    ]
    widths = [
        max(len(r[i]) for r in rows + [("metric", "measured", "reference")])
        for i in range(3)
    ]
    line = "+-" + "-+-".join("-" * w for w in widths) + "-+"
    out = [line]
    out.append(
        "| "
        + " | ".join(h.ljust(w) for h, w in zip(("metric", "measured", "reference"), widths))
        + " |"
    )
    out.append(line)
    for row in rows:
        out.append("| " + " | ".join(cell.ljust(w) for cell, w in zip(row, widths)) + " |")
    out.append(line)
    out.append(_REFERENCE_NOTE)
    return "\n".join(out)


def render_json(metrics: Metrics) -> str:
    return json.dumps(
        {"measured": metrics.to_jsonable(), "reference": REFERENCE, "note": _REFERENCE_NOTE},
        indent=2,
        sort_keys=True,
    )


def parse_json(text: str) -> Metrics:
    return Metrics.from_jsonable(json.loads(text)["measured"])


def report_metrics(metrics: Metrics, fmt: str = "table") -> str:
    if fmt == "table":
        return render_table(metrics)
    if fmt == "json":
        return render_json(metrics)
    raise ValueError(f"unknown format {fmt!r}")

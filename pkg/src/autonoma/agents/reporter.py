"""Reporter: aggregates task results into the final structured report.

Assembly is pure template work over the results (no provider call), so a
report is deterministic for a given workflow outcome. Section headings follow
the target language; content is carried verbatim from the agents, which
already mirror the user's language.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import NothingToReport
from ..model import Lang, Plan
from ..agentkit import AgentOutput, InvokeContext, TaskPayload
from ..supervisor.results import TaskResult

_HEADINGS = {
    Lang.EN: {
        "executive_summary": "Executive summary",
        "key_findings": "Key findings",
        "detailed_analysis": "Detailed analysis",
        "conclusions": "Conclusions and recommendations",
        "completed": "{done} of {total} steps completed successfully.",
        "failures": "{failed} step(s) failed and {skipped} were skipped.",
        "none_worked": "No step completed successfully.",
        "all_good": "All steps completed; no anomalies detected.",
        "review": "Review the failure log and re-run the affected steps.",
    },
    Lang.AR: {
        "executive_summary": "الملخص التنفيذي",
        "key_findings": "النتائج الرئيسية",
        "detailed_analysis": "التحليل المفصل",
        "conclusions": "الاستنتاجات والتوصيات",
        "completed": "اكتمل {done} من {total} خطوات بنجاح.",
        "failures": "فشلت {failed} خطوة وتم تخطي {skipped}.",
        "none_worked": "لم تكتمل أي خطوة بنجاح.",
        "all_good": "اكتملت جميع الخطوات؛ لم يتم رصد أي مشاكل.",
        "review": "راجع سجل الإخفاقات وأعد تشغيل الخطوات المتأثرة.",
    },
}

# cause -> advice; extensible through pre/post-report hooks
RECOMMENDATIONS = {
    "timeout": "raise max_runtime for the agent or split the step",
    "stalled": "raise the heartbeat allowance or check agent liveness",
    "privilege_violation": "adjust the agent's privilege grants",
    "approval_denied": "the user declined; re-plan without the destructive action",
    "agent_panic": "inspect the agent's raw output and logs",
    "parse": "inspect the raw output fed to the parser",
    "cancelled": "the workflow was cancelled by the user",
    "no_capable_agent": "register an agent declaring the required capability",
    "skipped": "unblock the failed dependency and re-run",
}
_DEFAULT_ADVICE = "inspect agent logs for the step"


@dataclass(frozen=True)
class Report:
    executive_summary: str
    key_findings: tuple[str, ...]
    detailed_analysis: str
    conclusions_and_recommendations: str
    sources: tuple[str, ...] = ()
    failure_log: tuple[dict, ...] = ()  # {"step_id", "cause", "recommendation"}
    lang: str = "en"

    def to_jsonable(self) -> dict:
        return {
            "executive_summary": self.executive_summary,
            "key_findings": list(self.key_findings),
            "detailed_analysis": self.detailed_analysis,
            "conclusions_and_recommendations": self.conclusions_and_recommendations,
            "sources": list(self.sources),
            "failure_log": list(self.failure_log),
            "lang": self.lang,
        }


def recommendation_for(cause: str) -> str:
    root = cause.split(":", 1)[0]
    return RECOMMENDATIONS.get(root, _DEFAULT_ADVICE)


def compile_report(plan: Plan, results: list[TaskResult], lang: Lang) -> Report:
    """Deterministic four-section report; failure_log covers Failed and Skipped."""
    if not results:
        raise NothingToReport("no task results to report on")
    t = _HEADINGS[Lang.AR if lang is Lang.AR else Lang.EN]
    by_id = {r.step_id: r for r in results}
    ordered = [by_id[s.id] for s in plan.steps if s.id in by_id]

    succeeded = [r for r in ordered if r.outcome == "succeeded"]
    failed = [r for r in ordered if r.outcome == "failed"]
    skipped = [r for r in ordered if r.outcome == "skipped"]

    findings = tuple(f"{r.step_id}: {r.summary}" for r in succeeded)
    failure_log = tuple(
        {
            "step_id": r.step_id,
            "cause": r.cause or r.outcome,
            "recommendation": recommendation_for(r.cause or r.outcome),
        }
        for r in failed + skipped
    )

    if succeeded:
        exec_lines = [t["completed"].format(done=len(succeeded), total=len(ordered))]
    else:
        exec_lines = [t["none_worked"]]
    if failed or skipped:
        exec_lines.append(t["failures"].format(failed=len(failed), skipped=len(skipped)))

    step_lines = []
    for r in ordered:
        marker = {"succeeded": "+", "failed": "x", "skipped": "-"}[r.outcome]
        detail = r.summary if r.outcome == "succeeded" else (r.cause or r.outcome)
        step_lines.append(f"[{marker}] {r.step_id} ({r.agent_id or '-'}, {r.duration_ms} ms): {detail}")

    sources = tuple(
        sorted({item["source_id"] for r in succeeded for item in r.data.get("items", [])})
    )

    conclusions = t["all_good"] if not (failed or skipped) else t["review"]

    return Report(
        executive_summary=" ".join(exec_lines),
        key_findings=findings,
        detailed_analysis="\n".join(step_lines),
        conclusions_and_recommendations=conclusions,
        sources=sources,
        failure_log=failure_log,
        lang=(Lang.AR if lang is Lang.AR else Lang.EN).value,
    )


class ReporterAgent:
    """Plannable 'report' capability: summarizes dependency outputs mid-plan."""

    def handle(self, task: TaskPayload, ctx: InvokeContext) -> AgentOutput:
        ctx.heartbeat()
        inputs = task.params.get("inputs", {})
        lines = [f"{sid}: {summary}" for sid, summary in sorted(inputs.items())]
        body = "\n".join(lines) if lines else task.description
        return AgentOutput(summary=f"section with {len(lines)} inputs", data={"body": body})

import { describe, expect, it } from "vitest";

import { initialView, renderTimeline, setDraft } from "../src/viewmodel";
import { event, midStreamEvents, resetSeq } from "./fixtures";

describe("renderTimeline", () => {
  it("maps dispatch/success to badge transitions Pending -> Running -> Done", () => {
    const events = midStreamEvents();
    const afterPlan = renderTimeline(initialView(), events.slice(0, 5));
    expect(afterPlan.planSteps.map((s) => s.badge)).toEqual([
      "pending", "pending", "pending", "pending",
    ]);
    const afterDispatch = renderTimeline(afterPlan, events.slice(5, 6));
    expect(afterDispatch.planSteps[0]?.badge).toBe("running");
    const afterSuccess = renderTimeline(afterDispatch, events.slice(6, 7));
    expect(afterSuccess.planSteps[0]?.badge).toBe("done");
  });

  it("renders duplicate deliveries once (idempotent per seq)", () => {
    const events = midStreamEvents();
    const view = renderTimeline(initialView(), events);
    const again = renderTimeline(view, [events[6]!, events[7]!, events[8]!]);
    expect(again).toEqual(view);
    expect(again.messages.length).toBe(view.messages.length);
  });

  it("flags a sequence gap and stops rendering", () => {
    const events = midStreamEvents();
    const view = renderTimeline(initialView(), events.slice(0, 3));
    const gappy = renderTimeline(view, [events[5]!]); // seq jumps 3 -> 6
    expect(gappy.gapDetected).toBe(true);
    expect(gappy.lastSeq).toBe(3); // nothing past the gap applied
  });

  it("is a pure function of the event prefix", () => {
    const events = midStreamEvents();
    const a = renderTimeline(initialView(), events);
    const b = renderTimeline(initialView(), events);
    expect(a).toEqual(b);
    // incremental folding matches batch folding
    let c = initialView();
    for (const e of events) c = renderTimeline(c, [e]);
    expect(c).toEqual(a);
  });

  it("marks skipped steps from the TaskFailed payload without graph logic", () => {
    const events = midStreamEvents();
    let view = renderTimeline(initialView(), events);
    resetSeq();
    for (let i = 0; i < 9; i++) event("Heartbeat", {}); // advance fixture seq
    const failure = event("TaskFailed", {
      step_id: "s2",
      agent_id: "w1",
      cause: "error",
      attempts: 1,
      skipped: ["s4"],
    });
    view = renderTimeline(view, [failure]);
    const badge = Object.fromEntries(view.planSteps.map((s) => [s.id, s.badge]));
    expect(badge.s2).toBe("failed");
    expect(badge.s4).toBe("skipped");
    expect(badge.s3).toBe("running"); // untouched sibling
  });

  it("keeps plan levels for DAG layout from the PlanProposed payload", () => {
    const view = renderTimeline(initialView(), midStreamEvents());
    expect(view.levels).toEqual([["s1"], ["s2", "s3"], ["s4"]]);
    expect(view.planSteps.find((s) => s.id === "s4")?.level).toBe(2);
  });

  it("shows prompt and reply messages in the timeline", () => {
    const view = renderTimeline(initialView(), midStreamEvents());
    expect(view.messages[0]?.content).toBe("do the diamond");
  });

  it("cancel close marks remaining steps skipped and sets the banner state", () => {
    const events = midStreamEvents();
    let view = renderTimeline(initialView(), events);
    resetSeq();
    for (let i = 0; i < 9; i++) event("Heartbeat", {});
    const f1 = event("TaskFailed", { step_id: "s2", cause: "cancelled", attempts: 1, skipped: [] });
    const f2 = event("TaskFailed", { step_id: "s3", cause: "cancelled", attempts: 1, skipped: [] });
    const closed = event("WorkflowClosed", { reason: "cancelled", skipped: ["s4"] });
    view = renderTimeline(view, [f1, f2, closed]);
    expect(view.workflowStatus).toBe("cancelled");
    const badge = Object.fromEntries(view.planSteps.map((s) => [s.id, s.badge]));
    expect(badge.s4).toBe("skipped");
  });

  it("draft editing does not disturb stream state", () => {
    const view = renderTimeline(initialView(), midStreamEvents());
    const drafted = setDraft(view, "next prompt");
    expect(drafted.lastSeq).toBe(view.lastSeq);
    expect(drafted.planSteps).toEqual(view.planSteps);
  });
});

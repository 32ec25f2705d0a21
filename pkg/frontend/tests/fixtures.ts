/** Event-log fixtures in the gateway's wire shape. */

import { WorkflowEvent } from "../src/types";

let seq = 0;

export function resetSeq(): void {
  seq = 0;
}

export function event(kind: WorkflowEvent["kind"], payload: Record<string, any>): WorkflowEvent {
  seq += 1;
  return { seq, kind, payload, timestamp: seq * 10 };
}

export function userMessage(id: string, content: string, lang = "en") {
  return { id, role: "user", content, lang, attachments: [], timestamp: 0 };
}

export function planPayload(steps: { id: string; deps: string[] }[], levels: string[][]) {
  return {
    plan: {
      plan: {
        thought: "fixture plan",
        steps: steps.map((s) => ({
          id: s.id,
          description: `do ${s.id}`,
          required_capability: "work",
          depends_on: s.deps,
        })),
        created_by: "planner",
      },
      levels,
    },
  };
}

/** A diamond-plan run up to mid-execution (s1 done, s2/s3 running). */
export function midStreamEvents(): WorkflowEvent[] {
  resetSeq();
  return [
    event("PromptReceived", { message: userMessage("m1", "do the diamond"), urgency: null }),
    event("IntentClassified", { intent: { class: "Task", confidence: 1, cues: ["provider"] } }),
    event("HandoffToPlanner", { conversation_id: "c1", context_digest: "d" }),
    event("HandoffRecorded", {
      record: { from_role: "coordinator", to_role: "planner", payload_digest: "d", accepted: true, timestamp: 0 },
    }),
    event("PlanProposed", planPayload(
      [
        { id: "s1", deps: [] },
        { id: "s2", deps: ["s1"] },
        { id: "s3", deps: ["s1"] },
        { id: "s4", deps: ["s2", "s3"] },
      ],
      [["s1"], ["s2", "s3"], ["s4"]],
    )),
    event("TaskDispatched", { step_id: "s1", agent_id: "w1", attempt: 1 }),
    event("TaskSucceeded", { step_id: "s1", agent_id: "w1", summary: "ok", artifacts: [], attempts: 1, duration_ms: 5 }),
    event("TaskDispatched", { step_id: "s2", agent_id: "w1", attempt: 1 }),
    event("TaskDispatched", { step_id: "s3", agent_id: "w2", attempt: 1 }),
  ];
}

export function approvalEvents(): WorkflowEvent[] {
  resetSeq();
  return [
    event("PromptReceived", { message: userMessage("m1", "clean old reports"), urgency: null }),
    event("IntentClassified", { intent: { class: "Task", confidence: 1, cues: [] } }),
    event("PlanProposed", planPayload(
      [
        { id: "del", deps: [] },
        { id: "summarize", deps: ["del"] },
      ],
      [["del"], ["summarize"]],
    )),
    event("TaskDispatched", { step_id: "del", agent_id: "file_manager", attempt: 1 }),
    event("ApprovalRequested", {
      step_id: "del",
      digest: "a".repeat(64),
      description: "delete reports/old.txt",
      kind: "delete",
    }),
  ];
}

/** Wire types mirroring the gateway's canonical JSON. */

export type EventKind =
  | "PromptReceived"
  | "IntentClassified"
  | "HandoffToPlanner"
  | "PlanProposed"
  | "TaskDispatched"
  | "Heartbeat"
  | "TaskRetried"
  | "TaskSucceeded"
  | "TaskFailed"
  | "HandoffRecorded"
  | "ApprovalRequested"
  | "ApprovalResolved"
  | "ReportReady"
  | "WorkflowClosed";

export interface WorkflowEvent {
  seq: number;
  kind: EventKind;
  payload: Record<string, any>;
  timestamp: number;
}

export interface WireMessage {
  id: string;
  role: "user" | "coordinator" | "planner" | "supervisor" | "agent" | "reporter";
  content: string;
  lang: "en" | "ar" | "und";
  attachments: string[];
  timestamp: number;
}

export interface WirePlanStep {
  id: string;
  description: string;
  required_capability: string;
  agent_hint?: string;
  depends_on: string[];
}

export type StepBadge =
  | "pending"
  | "running"
  | "retrying"
  | "done"
  | "failed"
  | "skipped";

export type ControlMessage =
  | { type: "cancel" }
  | { type: "approval"; digest: string; decision: "approve" | "deny" }
  | { type: "ping" };

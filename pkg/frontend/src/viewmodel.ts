/**
 * The console view model: a pure function of (event log prefix, ui language,
 * draft text). All workflow knowledge comes from received events — the client
 * never recomputes graph semantics (skip closures arrive in event payloads,
 * DAG layout arrives as dependency levels inside PlanProposed).
 *
 * renderTimeline is idempotent per seq: duplicate deliveries render once, and
 * a sequence gap flags the view so the connection layer resubscribes from the
 * last rendered seq.
 */

import { dir, Direction, UiLanguage } from "./i18n";
import { StepBadge, WireMessage, WorkflowEvent } from "./types";

export interface ChatEntry {
  id: string;
  role: string;
  content: string;
  lang: string;
}

export interface PlanStepView {
  id: string;
  description: string;
  level: number;
  badge: StepBadge;
  attempts: number;
}

export interface ApprovalView {
  digest: string;
  stepId: string;
  description: string;
  kind: string;
}

export type ConnectionStatus = "connecting" | "open" | "closed";

export interface ViewState {
  conversationId: string | null;
  lastSeq: number;
  messages: ChatEntry[];
  planSteps: PlanStepView[];
  levels: string[][];
  pendingApprovals: ApprovalView[];
  workflowStatus: string;
  report: Record<string, unknown> | null;
  connection: ConnectionStatus;
  language: UiLanguage;
  direction: Direction;
  draft: string;
  scrollPosition: number;
  gapDetected: boolean;
  toasts: string[];
}

export function initialView(language: UiLanguage = "en"): ViewState {
  return {
    conversationId: null,
    lastSeq: 0,
    messages: [],
    planSteps: [],
    levels: [],
    pendingApprovals: [],
    workflowStatus: "idle",
    report: null,
    connection: "connecting",
    language,
    direction: dir(language),
    draft: "",
    scrollPosition: 0,
    gapDetected: false,
    toasts: [],
  };
}

function withBadge(view: ViewState, stepId: string, badge: StepBadge, attempts?: number): ViewState {
  return {
    ...view,
    planSteps: view.planSteps.map((s) =>
      s.id === stepId ? { ...s, badge, attempts: attempts ?? s.attempts } : s,
    ),
  };
}

function withSkipped(view: ViewState, stepIds: string[]): ViewState {
  if (stepIds.length === 0) return view;
  const skipped = new Set(stepIds);
  return {
    ...view,
    planSteps: view.planSteps.map((s) =>
      skipped.has(s.id) && s.badge !== "done" && s.badge !== "failed"
        ? { ...s, badge: "skipped" as StepBadge }
        : s,
    ),
  };
}

function appendMessage(view: ViewState, wire: WireMessage): ViewState {
  if (view.messages.some((m) => m.id === wire.id)) return view;
  return {
    ...view,
    messages: [
      ...view.messages,
      { id: wire.id, role: wire.role, content: wire.content, lang: wire.lang },
    ],
  };
}

/** Apply one event with seq === lastSeq + 1. */
function applyEvent(view: ViewState, event: WorkflowEvent): ViewState {
  const next = { ...view, lastSeq: event.seq };
  const p = event.payload;
  switch (event.kind) {
    case "PromptReceived":
      return { ...appendMessage(next, p.message), workflowStatus: "classifying" };
    case "IntentClassified": {
      const after = p.reply ? appendMessage(next, p.reply) : next;
      const cls = p.intent?.class ?? "";
      const status =
        cls === "Task" ? "planning" : cls === "Harmful" ? "rejected" : "idle";
      return { ...after, workflowStatus: status };
    }
    case "HandoffToPlanner":
    case "HandoffRecorded":
      return next;
    case "PlanProposed": {
      const steps: WirePlanStepWithLevel[] = flattenPlan(p);
      return {
        ...next,
        workflowStatus: "executing",
        levels: (p.plan?.levels ?? []) as string[][],
        planSteps: steps.map((s) => ({
          id: s.id,
          description: s.description,
          level: s.level,
          badge: "pending" as StepBadge,
          attempts: 0,
        })),
      };
    }
    case "TaskDispatched":
      return withBadge(next, p.step_id, "running", p.attempt);
    case "Heartbeat":
      return next;
    case "TaskRetried":
      return withBadge(next, p.step_id, "retrying");
    case "TaskSucceeded":
      return withBadge(next, p.step_id, "done", p.attempts);
    case "TaskFailed": {
      const failed = withBadge(next, p.step_id, "failed", p.attempts);
      return withSkipped(failed, (p.skipped ?? []) as string[]);
    }
    case "ApprovalRequested":
      return {
        ...next,
        workflowStatus: "awaiting approval",
        pendingApprovals: [
          ...next.pendingApprovals,
          { digest: p.digest, stepId: p.step_id, description: p.description, kind: p.kind },
        ],
      };
    case "ApprovalResolved": {
      const remaining = next.pendingApprovals.filter((a) => a.digest !== p.digest);
      return {
        ...next,
        pendingApprovals: remaining,
        workflowStatus: remaining.length > 0 ? "awaiting approval" : "executing",
      };
    }
    case "ReportReady":
      return {
        ...next,
        report: p.report ?? null,
        messages: p.report?.executive_summary
          ? [
              ...next.messages,
              {
                id: `report-${event.seq}`,
                role: "reporter",
                content: String(p.report.executive_summary),
                lang: String(p.report.lang ?? "en"),
              },
            ]
          : next.messages,
        workflowStatus: "reporting",
      };
    case "WorkflowClosed": {
      const after = withSkipped(next, (p.skipped ?? []) as string[]);
      const status = p.reason === "cancelled" ? "cancelled" : "closed";
      return { ...after, workflowStatus: status };
    }
    default:
      return next;
  }
}

interface WirePlanStepWithLevel {
  id: string;
  description: string;
  level: number;
}

function flattenPlan(payload: Record<string, any>): WirePlanStepWithLevel[] {
  const steps = payload.plan?.plan?.steps ?? [];
  const levels: string[][] = payload.plan?.levels ?? [];
  const levelOf = new Map<string, number>();
  levels.forEach((lvl, i) => lvl.forEach((sid) => levelOf.set(sid, i)));
  return steps.map((s: { id: string; description: string }) => ({
    id: s.id,
    description: s.description,
    level: levelOf.get(s.id) ?? 0,
  }));
}

/**
 * Fold a batch of received events into the view. Duplicates (seq <= lastSeq)
 * are dropped; a gap (seq > lastSeq + 1) sets gapDetected and stops, leaving
 * resubscription to the connection layer.
 */
export function renderTimeline(view: ViewState, events: WorkflowEvent[]): ViewState {
  let current = view;
  for (const event of events) {
    if (event.seq <= current.lastSeq) continue; // duplicate delivery renders once
    if (event.seq > current.lastSeq + 1) {
      return { ...current, gapDetected: true };
    }
    current = applyEvent(current, event);
  }
  return current;
}

/**
 * Reload-free language switch: chrome strings re-resolve through the locale
 * bundle at render time, direction flips for Arabic, and everything the user
 * cares about — scroll position, draft text, connection, stream progress —
 * is untouched. Switching to the current language is a no-op.
 */
export function switchLanguage(view: ViewState, target: UiLanguage): ViewState {
  if (view.language === target) return view;
  return { ...view, language: target, direction: dir(target) };
}

export function setDraft(view: ViewState, draft: string): ViewState {
  return { ...view, draft };
}

export function setScroll(view: ViewState, position: number): ViewState {
  return { ...view, scrollPosition: position };
}

export function setConnection(view: ViewState, status: ConnectionStatus): ViewState {
  return { ...view, connection: status };
}

export function clearGap(view: ViewState): ViewState {
  return { ...view, gapDetected: false };
}

export function addToast(view: ViewState, text: string): ViewState {
  return { ...view, toasts: [...view.toasts, text] };
}

/**
 * Browser bootstrap: wires the pure view model to the DOM and the gateway.
 * Everything interesting is in viewmodel/connection/render; this file only
 * shuttles between them and the page.
 */

import { EventChannel } from "./connection";
import { UiLanguage } from "./i18n";
import { loadPairing, parsePairingInput, savePairing } from "./pairing";
import { render } from "./render";
import {
  clearGap,
  initialView,
  renderTimeline,
  setConnection,
  setDraft,
  setScroll,
  switchLanguage,
  ViewState,
} from "./viewmodel";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

let view: ViewState = initialView("en");
let channel: EventChannel | null = null;

function paint(): void {
  const out = render(view);
  document.documentElement.dir = out.direction;
  document.title = out.title;
  el("connection").textContent = out.connectionLabel;
  el("plan-heading").textContent = out.planHeading;
  el<HTMLButtonElement>("lang-toggle").textContent = out.languageToggleLabel;

  const timeline = el("timeline");
  timeline.replaceChildren(
    ...out.messages.map((m) => {
      const row = document.createElement("div");
      row.className = `msg msg-${m.role}`;
      row.textContent = `${m.role}: ${m.content}`;
      return row;
    }),
  );
  timeline.scrollTop = out.scrollPosition;

  el("plan").replaceChildren(
    ...out.steps.map((s) => {
      const row = document.createElement("div");
      row.className = "step";
      row.textContent = `${s.id} · ${s.label}`;
      const badge = document.createElement("span");
      badge.className = s.badgeClass;
      badge.textContent = s.badgeText;
      row.appendChild(badge);
      return row;
    }),
  );

  const modal = el("approval-modal");
  modal.style.display = out.approvalModal.visible ? "block" : "none";
  el("approval-heading").textContent = out.approvalModal.heading;
  el("approval-description").textContent = out.approvalModal.description;
  el<HTMLButtonElement>("approval-approve").textContent = out.approvalModal.approveLabel;
  el<HTMLButtonElement>("approval-deny").textContent = out.approvalModal.denyLabel;

  el("banner").textContent = out.banner ?? "";
  const draftBox = el<HTMLTextAreaElement>("draft");
  if (draftBox.value !== out.draft) draftBox.value = out.draft;
}

function update(next: ViewState): void {
  view = next;
  paint();
}

async function submitPrompt(token: string): Promise<void> {
  const text = view.draft.trim();
  if (!text) return;
  const response = await fetch("/api/prompt", {
    method: "POST",
    headers: { "content-type": "application/json", authorization: `Bearer ${token}` },
    body: JSON.stringify(
      view.conversationId ? { conversation_id: view.conversationId, text } : { text },
    ),
  });
  if (!response.ok) return;
  const body = await response.json();
  update({ ...setDraft(view, ""), conversationId: body.conversation_id });
  openChannel(token, body.conversation_id);
}

function openChannel(token: string, conversationId: string): void {
  channel?.close();
  channel = new EventChannel(
    (url) => new WebSocket(url) as unknown as import("./connection").WsLike,
    `ws://${location.host}`,
    conversationId,
    token,
    {
      onEvents: (events) => {
        let next = renderTimeline(view, events);
        if (next.gapDetected) next = clearGap(next);
        update(next);
      },
      onStatus: (status) => update(setConnection(view, status)),
      lastRenderedSeq: () => view.lastSeq,
      gapPending: () => view.gapDetected,
    },
  );
  channel.connect(view.lastSeq);
}

function boot(): void {
  const storage = window.sessionStorage;
  let pairing = loadPairing(storage);
  if (!pairing) {
    const raw = window.prompt(render(view).title + "\n" + "pairing token / autonoma:// link");
    const parsed = raw ? parsePairingInput(raw) : null;
    if (!parsed) return;
    savePairing(storage, parsed);
    pairing = parsed;
  }
  const token = pairing.token;

  el<HTMLButtonElement>("send").addEventListener("click", () => void submitPrompt(token));
  el<HTMLTextAreaElement>("draft").addEventListener("input", (e) => {
    view = setDraft(view, (e.target as HTMLTextAreaElement).value); // no repaint needed
  });
  el("timeline").addEventListener("scroll", (e) => {
    view = setScroll(view, (e.target as HTMLElement).scrollTop);
  });
  el<HTMLButtonElement>("lang-toggle").addEventListener("click", () => {
    const target: UiLanguage = view.language === "en" ? "ar" : "en";
    update(switchLanguage(view, target));
  });
  el<HTMLButtonElement>("cancel").addEventListener("click", () => {
    channel?.sendControl({ type: "cancel" });
  });
  el<HTMLButtonElement>("approval-approve").addEventListener("click", () => {
    const approval = view.pendingApprovals[0];
    if (approval) {
      channel?.sendControl({ type: "approval", digest: approval.digest, decision: "approve" });
    }
  });
  el<HTMLButtonElement>("approval-deny").addEventListener("click", () => {
    const approval = view.pendingApprovals[0];
    if (approval) {
      channel?.sendControl({ type: "approval", digest: approval.digest, decision: "deny" });
    }
  });
  paint();
}

if (typeof document !== "undefined") {
  window.addEventListener("DOMContentLoaded", boot);
}

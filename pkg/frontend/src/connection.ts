/**
 * Live channel to the gateway: since-seq resumption, exponential backoff
 * capped at 10 s, and a control queue. Controls sent while the channel is
 * closed are queued and replayed exactly once after resubscription; the UI
 * never applies them optimistically — it waits for the resulting event.
 */

import { ControlMessage, WorkflowEvent } from "./types";

export interface WsLike {
  send(data: string): void;
  close(): void;
  onopen: (() => void) | null;
  onclose: (() => void) | null;
  onmessage: ((event: { data: string }) => void) | null;
}

export type WsFactory = (url: string) => WsLike;

export interface ChannelCallbacks {
  onEvents(events: WorkflowEvent[]): void;
  onStatus(status: "connecting" | "open" | "closed"): void;
  onServerMessage?(message: Record<string, unknown>): void;
  /** The view model reports gaps; the channel resubscribes from this seq. */
  lastRenderedSeq(): number;
  gapPending(): boolean;
}

const BACKOFF_BASE_MS = 500;
const BACKOFF_CAP_MS = 10_000;

export class EventChannel {
  private ws: WsLike | null = null;
  private queue: ControlMessage[] = [];
  private attempts = 0;
  private closedByUser = false;
  private timer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private readonly factory: WsFactory,
    private readonly baseUrl: string,
    private readonly conversationId: string,
    private readonly token: string,
    private readonly callbacks: ChannelCallbacks,
    private readonly schedule: (fn: () => void, ms: number) => ReturnType<typeof setTimeout> = setTimeout,
  ) {}

  url(since: number): string {
    return `${this.baseUrl}/ws/conversations/${this.conversationId}?since=${since}&token=${this.token}`;
  }

  connect(since: number): void {
    this.callbacks.onStatus("connecting");
    const ws = this.factory(this.url(since));
    this.ws = ws;
    ws.onopen = () => {
      this.attempts = 0;
      this.callbacks.onStatus("open");
      const pending = this.queue;
      this.queue = [];
      for (const control of pending) {
        ws.send(JSON.stringify(control)); // replayed exactly once
      }
    };
    ws.onmessage = (event) => {
      const parsed = JSON.parse(event.data);
      if (typeof parsed.seq === "number" && typeof parsed.kind === "string") {
        this.callbacks.onEvents([parsed as WorkflowEvent]);
        if (this.callbacks.gapPending()) {
          this.resubscribe();
        }
      } else {
        this.callbacks.onServerMessage?.(parsed);
      }
    };
    ws.onclose = () => {
      this.ws = null;
      this.callbacks.onStatus("closed");
      if (!this.closedByUser) {
        this.attempts += 1;
        const delay = Math.min(BACKOFF_BASE_MS * 2 ** (this.attempts - 1), BACKOFF_CAP_MS);
        this.timer = this.schedule(() => this.connect(this.callbacks.lastRenderedSeq()), delay);
      }
    };
  }

  /** Gap recovery: drop the socket and resubscribe from the last rendered seq. */
  resubscribe(): void {
    const ws = this.ws;
    this.ws = null;
    if (ws) {
      ws.onclose = null; // not an outage; no backoff
      ws.close();
    }
    this.connect(this.callbacks.lastRenderedSeq());
  }

  sendControl(control: ControlMessage): void {
    if (this.ws) {
      this.ws.send(JSON.stringify(control));
    } else {
      this.queue.push(control); // replayed once on the next open
    }
  }

  currentBackoffMs(): number {
    if (this.attempts === 0) return 0;
    return Math.min(BACKOFF_BASE_MS * 2 ** (this.attempts - 1), BACKOFF_CAP_MS);
  }

  close(): void {
    this.closedByUser = true;
    if (this.timer !== null) clearTimeout(this.timer);
    this.ws?.close();
    this.ws = null;
  }
}

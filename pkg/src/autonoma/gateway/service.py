"""LAN-confined gateway service.

HTTP surface: POST /api/prompt, GET /api/conversations,
GET /api/conversations/{id}, POST /api/approvals/{id}, and a bidirectional
event stream at /ws/conversations/{id}?since=N. The IP filter wraps the whole
ASGI app, so a denied address produces no parsing, no storage write, and no
audit entry. Prompt submission returns as soon as PromptReceived is appended;
the workflow runs on a worker thread and streams its progress.
"""

from __future__ import annotations

import asyncio
import json
import threading
import uuid
from dataclasses import dataclass, field

from fastapi import FastAPI, Request, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse

from ..clock import Clock, WallClock
from ..errors import StoreNotFound
from ..model import EventKind, WorkflowEvent, is_busy
from ..model.serialize import (
    canonical_dumps,
    digest,
    event_to_jsonable,
    message_to_jsonable,
)
from ..runtime import ConversationRuntime, WorkflowPipeline
from ..store import AuditLog, ConversationRecord, ConversationStore
from .auth import PairingAuthority
from .config import ServiceConfig
from .ipfilter import IpFilterMiddleware, parse_allowlist

_AUDIT_ACTOR = {
    EventKind.PROMPT_RECEIVED: "user",
    EventKind.INTENT_CLASSIFIED: "coordinator",
    EventKind.HANDOFF_TO_PLANNER: "coordinator",
    EventKind.PLAN_PROPOSED: "planner",
    EventKind.TASK_DISPATCHED: "supervisor",
    EventKind.HEARTBEAT: "agent",
    EventKind.TASK_RETRIED: "supervisor",
    EventKind.TASK_SUCCEEDED: "agent",
    EventKind.TASK_FAILED: "supervisor",
    EventKind.HANDOFF_RECORDED: "supervisor",
    EventKind.APPROVAL_REQUESTED: "agent",
    EventKind.APPROVAL_RESOLVED: "user",
    EventKind.REPORT_READY: "reporter",
    EventKind.WORKFLOW_CLOSED: "supervisor",
}


@dataclass
class ConversationHandle:
    runtime: ConversationRuntime
    title: str
    created_at: int
    # reentrant: submitting under the lock emits PromptReceived, whose fan-out
    # re-enters to snapshot subscribers on the same thread
    lock: threading.RLock = field(default_factory=threading.RLock)
    worker: threading.Thread | None = None
    subscribers: list = field(default_factory=list)  # (loop, asyncio.Queue)

    def subscribe(self, loop) -> asyncio.Queue:
        q: asyncio.Queue = asyncio.Queue()
        with self.lock:
            self.subscribers.append((loop, q))
        return q

    def unsubscribe(self, q: asyncio.Queue) -> None:
        with self.lock:
            self.subscribers = [(l, s) for l, s in self.subscribers if s is not q]

    def fan_out(self, event: WorkflowEvent) -> None:
        with self.lock:
            targets = list(self.subscribers)
        for loop, q in targets:
            loop.call_soon_threadsafe(q.put_nowait, event)

    def busy(self) -> bool:
        if self.worker is not None and self.worker.is_alive():
            return True
        return is_busy(self.runtime.state)


class GatewayService:
    def __init__(
        self,
        config: ServiceConfig,
        pipeline: WorkflowPipeline,
        store: ConversationStore | None = None,
        audit: AuditLog | None = None,
        clock: Clock | None = None,
        pairing: PairingAuthority | None = None,
        shared_trace: list | None = None,
    ):
        self.config = config
        self.pipeline = pipeline
        self.clock = clock or WallClock()
        self.store = store or ConversationStore(config.storage_root)
        self.audit = audit if audit is not None else AuditLog(config.storage_root)
        self.pairing = pairing or PairingAuthority(config.pairing_ttl_ms, self.clock)
        # when the provider backends record into this shared list, each
        # conversation's completions are dumped beside its transcript
        self.shared_trace = shared_trace
        self.conversations: dict[str, ConversationHandle] = {}
        self._lock = threading.Lock()

    # -- conversation lifecycle ---------------------------------------------------

    def get_handle(self, conversation_id: str) -> ConversationHandle | None:
        with self._lock:
            return self.conversations.get(conversation_id)

    def create_conversation(self, title: str, conversation_id: str | None = None) -> ConversationHandle:
        cid = conversation_id or uuid.uuid4().hex
        handle = ConversationHandle(
            runtime=ConversationRuntime(cid, clock=self.clock),
            title=title[:60],
            created_at=self.clock.now_ms(),
        )
        handle.runtime.on_event = lambda event: self._on_event(handle, event)
        with self._lock:
            self.conversations[cid] = handle
        return handle

    def _on_event(self, handle: ConversationHandle, event: WorkflowEvent) -> None:
        if self.audit is not None:
            self.audit.append(
                timestamp=event.timestamp,
                actor=_AUDIT_ACTOR.get(event.kind, "system"),
                action=event.kind.value,
                input_digest=digest(event.payload),
            )
        handle.fan_out(event)

    def _persist(self, handle: ConversationHandle) -> None:
        record = ConversationRecord(
            id=handle.runtime.conversation_id,
            title=handle.title,
            created_at=handle.created_at,
        )
        self.store.persist(record, list(handle.runtime.messages), list(handle.runtime.events))
        if self.shared_trace:
            from ..provider import ProviderScript

            trace_path = (
                self.store.conversation_dir(handle.runtime.conversation_id)
                / "provider_trace.json"
            )
            ProviderScript(list(self.shared_trace)).dump(trace_path)
            self.shared_trace.clear()

    def submit_prompt(
        self,
        handle: ConversationHandle,
        text: str,
        attachments: tuple,
        policy_overrides: dict | None = None,
    ) -> int:
        """Append PromptReceived and kick off the pipeline asynchronously."""
        artifacts_dir = str(
            self.store.conversation_dir(handle.runtime.conversation_id) / "artifacts"
        )
        policy = None
        if policy_overrides:
            merged = self.config.policy.to_jsonable()
            merged.update(
                {k: v for k, v in policy_overrides.items() if not k.startswith("pregather")}
            )
            from ..supervisor import ExecutionPolicy

            policy = ExecutionPolicy.from_jsonable(merged)
        pregather_budget = (policy_overrides or {}).get("pregather_budget")
        message = self.pipeline.receive_prompt(handle.runtime, text, attachments)

        def _work():
            try:
                self.pipeline.continue_after_prompt(
                    handle.runtime,
                    message,
                    policy=policy,
                    artifacts_dir=artifacts_dir,
                    pregather_budget=pregather_budget,
                )
            finally:
                self._persist(handle)

        handle.worker = threading.Thread(
            target=_work, daemon=True, name=f"wf-{handle.runtime.conversation_id[:8]}"
        )
        handle.worker.start()
        return handle.runtime.events[-1].seq

    def validate_attachments(self, handle: ConversationHandle, attachments: tuple) -> bool:
        """Attachments may reference stored artifacts of this conversation only."""
        if not attachments:
            return True
        base = self.store.conversation_dir(handle.runtime.conversation_id) / "artifacts"
        for ref in attachments:
            candidate = (base / ref).resolve()
            try:
                candidate.relative_to(base.resolve())
            except ValueError:
                return False
            if not candidate.is_file():
                return False
        return True

    # -- pairing -------------------------------------------------------------------

    def issue_pairing(self) -> tuple[str, str]:
        return self.pairing.issue(self.config.bind_host, self.config.bind_port)


def _bearer_token(request: Request) -> str | None:
    header = request.headers.get("authorization", "")
    if header.lower().startswith("bearer "):
        return header[7:].strip()
    return None


def create_app(service: GatewayService):
    app = FastAPI(title="autonoma gateway", docs_url=None, redoc_url=None)

    def _client_id(request: Request) -> str:
        return request.client.host if request.client else "unknown"

    def _authed(request: Request) -> bool:
        return service.pairing.authenticate(_bearer_token(request), _client_id(request))

    @app.post("/api/prompt")
    async def submit_prompt(request: Request):
        if not _authed(request):
            return JSONResponse({"detail": "unauthenticated"}, status_code=401)
        body = await request.body()
        if len(body) > service.config.body_cap_bytes:
            return JSONResponse({"detail": "body too large"}, status_code=413)
        try:
            doc = json.loads(body)
            text = doc["text"]
        except (json.JSONDecodeError, KeyError, TypeError):
            return JSONResponse({"detail": "malformed prompt"}, status_code=400)
        attachments = tuple(doc.get("attachments", ()))
        cid = doc.get("conversation_id")

        if cid is not None:
            handle = service.get_handle(cid)
            if handle is None:
                return JSONResponse({"detail": "unknown conversation"}, status_code=404)
        else:
            handle = service.create_conversation(title=text)

        if not service.validate_attachments(handle, attachments):
            return JSONResponse(
                {"detail": "attachments must reference stored artifacts"}, status_code=400
            )
        with handle.lock:  # busy-check and worker spawn must be atomic
            if handle.busy():
                return JSONResponse(
                    {"detail": "conversation has an active workflow"}, status_code=409
                )
            seq = service.submit_prompt(
                handle, text, attachments, policy_overrides=doc.get("policy")
            )
        return {
            "conversation_id": handle.runtime.conversation_id,
            "accepted": True,
            "seq": seq,
        }

    @app.get("/api/conversations")
    async def list_conversations(request: Request):
        if not _authed(request):
            return JSONResponse({"detail": "unauthenticated"}, status_code=401)
        live = {
            cid: {
                "id": cid,
                "title": h.title,
                "created_at": h.created_at,
                "status": h.runtime.state.status.value,
                "last_seq": len(h.runtime.events),
            }
            for cid, h in list(service.conversations.items())
        }
        for cid in service.store.list_ids():
            if cid not in live:
                try:
                    record, _, events = service.store.load(cid)
                except Exception:
                    continue
                live[cid] = {
                    "id": cid,
                    "title": record.title,
                    "created_at": record.created_at,
                    "status": "Persisted",
                    "last_seq": len(events),
                }
        return {"conversations": sorted(live.values(), key=lambda c: c["id"])}

    @app.get("/api/conversations/{cid}")
    async def get_conversation(cid: str, request: Request):
        if not _authed(request):
            return JSONResponse({"detail": "unauthenticated"}, status_code=401)
        handle = service.get_handle(cid)
        if handle is not None:
            return {
                "id": cid,
                "title": handle.title,
                "status": handle.runtime.state.status.value,
                "messages": [message_to_jsonable(m) for m in handle.runtime.messages],
                "events": [event_to_jsonable(e) for e in handle.runtime.events],
            }
        try:
            record, messages, events = service.store.load(cid)
        except StoreNotFound:
            return JSONResponse({"detail": "unknown conversation"}, status_code=404)
        return {
            "id": cid,
            "title": record.title,
            "status": "Persisted",
            "messages": [message_to_jsonable(m) for m in messages],
            "events": [event_to_jsonable(e) for e in events],
        }

    @app.post("/api/approvals/{cid}")
    async def resolve_approval(cid: str, request: Request):
        if not _authed(request):
            return JSONResponse({"detail": "unauthenticated"}, status_code=401)
        handle = service.get_handle(cid)
        if handle is None:
            return JSONResponse({"detail": "unknown conversation"}, status_code=404)
        try:
            doc = json.loads(await request.body())
            action_digest = doc["digest"]
            decision = doc["decision"]
        except (json.JSONDecodeError, KeyError, TypeError):
            return JSONResponse({"detail": "malformed approval"}, status_code=400)
        pending = handle.runtime.state.pending_approvals
        if not pending:
            return JSONResponse({"detail": "no pending approval"}, status_code=404)
        if action_digest not in pending:
            return JSONResponse({"detail": "digest mismatch"}, status_code=409)
        ok = service.pipeline.submit_approval(cid, action_digest, decision == "approve")
        if not ok:
            return JSONResponse({"detail": "no active workflow"}, status_code=409)
        return {"acknowledged": True}

    @app.websocket("/ws/conversations/{cid}")
    async def stream_events(ws: WebSocket, cid: str):
        token = ws.query_params.get("token")
        client_id = ws.client.host if ws.client else "unknown"
        if not service.pairing.authenticate(token, client_id):
            await ws.close(code=4401)
            return
        handle = service.get_handle(cid)
        if handle is None:
            await ws.close(code=4404)
            return
        since = int(ws.query_params.get("since", 0))
        await ws.accept()

        loop = asyncio.get_running_loop()
        queue = handle.subscribe(loop)
        # snapshot under the runtime lock so (snapshot + live) is gapless
        with handle.runtime._lock:
            snapshot = list(handle.runtime.events)
        last_sent = since
        try:
            for event in snapshot:
                if event.seq > last_sent:
                    await ws.send_text(canonical_dumps(event_to_jsonable(event)))
                    last_sent = event.seq

            receiver = asyncio.create_task(ws.receive_text())
            getter = asyncio.create_task(queue.get())
            while True:
                done, _ = await asyncio.wait(
                    {receiver, getter}, return_when=asyncio.FIRST_COMPLETED
                )
                if getter in done:
                    event = getter.result()
                    if event.seq > last_sent:
                        await ws.send_text(canonical_dumps(event_to_jsonable(event)))
                        last_sent = event.seq
                    getter = asyncio.create_task(queue.get())
                if receiver in done:
                    try:
                        raw = receiver.result()
                    except WebSocketDisconnect:
                        break
                    await _handle_client_message(service, handle, ws, raw)
                    receiver = asyncio.create_task(ws.receive_text())
        except (WebSocketDisconnect, RuntimeError):
            pass
        finally:
            handle.unsubscribe(queue)
            for task in (receiver, getter):
                if not task.done():
                    task.cancel()

    return IpFilterMiddleware(app, parse_allowlist(list(service.config.allowlist)))


async def _handle_client_message(service, handle, ws: WebSocket, raw: str) -> None:
    """Client -> server messages: approval decisions, cancel requests, ping."""
    cid = handle.runtime.conversation_id
    try:
        msg = json.loads(raw)
        kind = msg.get("type")
    except json.JSONDecodeError:
        await ws.send_text(json.dumps({"type": "error", "detail": "malformed message"}))
        return
    if kind == "ping":
        await ws.send_text(json.dumps({"type": "pong"}))
    elif kind == "cancel":
        ok = service.pipeline.cancel(cid)
        await ws.send_text(json.dumps({"type": "cancel_ack", "accepted": ok}))
    elif kind == "approval":
        action_digest = msg.get("digest", "")
        pending = handle.runtime.state.pending_approvals
        if action_digest not in pending:
            await ws.send_text(json.dumps({"type": "error", "detail": "digest mismatch"}))
            return
        ok = service.pipeline.submit_approval(
            cid, action_digest, msg.get("decision") == "approve"
        )
        await ws.send_text(json.dumps({"type": "approval_ack", "accepted": ok}))
    else:
        await ws.send_text(json.dumps({"type": "error", "detail": "unknown message type"}))

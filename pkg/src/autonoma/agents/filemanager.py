"""File-manager agent: jailed file operations with destructive-action gating.

Destructive operations (delete, move, write over an existing file) require a
single-use approval token bound to (conversation, action digest) and expiring
after ten minutes. Without a valid token the operation returns
PendingApproval and the workflow parks in AwaitingApproval until the user
decides.

Task descriptions use a small verb grammar so scripted plans can drive real
file operations offline:

    list <path> | read <path> | delete <path> | search <pattern>
    copy <src> <dst> | move <src> <dst> | write <path> :: <content>
"""

from __future__ import annotations

import secrets
import shutil
import threading
from dataclasses import dataclass
from pathlib import Path

from ..clock import Clock, WallClock
from ..errors import ApprovalDenied, FileOpNotFound, JailEscape
from ..model.serialize import digest
from ..agentkit import AgentOutput, ApprovalRequired, InvokeContext, TaskPayload
from .jail import resolve_in_jail

DESTRUCTIVE_KINDS = frozenset({"delete", "move"})
APPROVAL_TTL_MS = 10 * 60 * 1000


@dataclass(frozen=True)
class FileOp:
    kind: str  # copy | move | delete | search | list | read | write
    paths: tuple[str, ...]
    content: str | None = None

    def is_destructive(self, jail: Path) -> bool:
        """delete, move, and overwrite-write are destructive."""
        if self.kind in DESTRUCTIVE_KINDS:
            return True
        if self.kind == "write":
            try:
                return resolve_in_jail(jail, self.paths[0]).exists()
            except JailEscape:
                return False  # the jail check will reject it anyway
        return False

    def action_digest(self, conversation_id: str) -> str:
        return digest(
            {
                "conversation": conversation_id,
                "kind": self.kind,
                "paths": list(self.paths),
                "content": self.content,
            }
        )


@dataclass(frozen=True)
class FileOpResult:
    op: FileOp
    entries: tuple[str, ...] = ()
    content: str | None = None
    summary: str = ""


@dataclass
class _TokenRecord:
    conversation_id: str
    action_digest: str
    expires_at_ms: int
    used: bool = False


class ApprovalTokenBox:
    """Mints and validates single-use, digest-bound approval tokens."""

    def __init__(self, clock: Clock | None = None):
        self.clock = clock or WallClock()
        self._lock = threading.Lock()
        self._tokens: dict[str, _TokenRecord] = {}

    def mint(self, conversation_id: str, action_digest: str) -> str:
        token = secrets.token_urlsafe(24)
        with self._lock:
            self._tokens[token] = _TokenRecord(
                conversation_id=conversation_id,
                action_digest=action_digest,
                expires_at_ms=self.clock.now_ms() + APPROVAL_TTL_MS,
            )
        return token

    def consume(self, token: str, conversation_id: str, action_digest: str) -> None:
        """Valid exactly once, within TTL, for the bound action; else raises."""
        with self._lock:
            rec = self._tokens.get(token)
            if rec is None or rec.used:
                raise ApprovalDenied("approval token unknown or already used")
            if rec.conversation_id != conversation_id or rec.action_digest != action_digest:
                raise ApprovalDenied("approval token bound to a different action")
            if self.clock.now_ms() > rec.expires_at_ms:
                raise ApprovalDenied("approval token expired")
            rec.used = True


def parse_fileop(text: str) -> FileOp:
    """Parse the verb grammar documented in the module docstring."""
    if "::" in text:
        head, _, content = text.partition("::")
        parts = head.split()
        content = content.strip()
    else:
        parts = text.split()
        content = None
    if not parts:
        raise FileOpNotFound("empty file operation")
    verb = parts[0].lower()
    if verb not in {"copy", "move", "delete", "search", "list", "read", "write"}:
        raise FileOpNotFound(f"unknown file operation verb {verb!r}")
    return FileOp(kind=verb, paths=tuple(parts[1:]), content=content)


def execute_fileop(
    op: FileOp,
    jail: str | Path,
    conversation_id: str = "",
    approval_token: str | None = None,
    token_box: ApprovalTokenBox | None = None,
) -> FileOpResult:
    """Run one operation inside the jail.

    Destructive ops must present a valid token (consumed here); otherwise the
    caller receives ApprovalRequired carrying the action digest.
    """
    jail = Path(jail)
    if not jail.is_dir():
        raise FileOpNotFound(f"jail {jail} does not exist")
    if not op.paths and op.kind != "search":
        raise FileOpNotFound(f"{op.kind} needs a path")

    if op.is_destructive(jail):
        action_digest = op.action_digest(conversation_id)
        if approval_token is None:
            raise ApprovalRequired(
                digest=action_digest,
                description=f"{op.kind} {' '.join(op.paths)}",
                kind=op.kind,
            )
        if token_box is None:
            raise ApprovalDenied("no token authority configured")
        token_box.consume(approval_token, conversation_id, action_digest)

    if op.kind == "list":
        target = resolve_in_jail(jail, op.paths[0] if op.paths else ".")
        if not target.is_dir():
            raise FileOpNotFound(f"not a directory: {op.paths[0]!r}")
        entries = tuple(sorted(p.name for p in target.iterdir()))
        return FileOpResult(op=op, entries=entries, summary=f"{len(entries)} entries")

    if op.kind == "search":
        pattern = op.paths[0] if op.paths else "*"
        hits = tuple(
            sorted(
                p.relative_to(jail).as_posix()
                for p in jail.rglob(pattern)
            )
        )
        return FileOpResult(op=op, entries=hits, summary=f"{len(hits)} matches")

    if op.kind == "read":
        target = resolve_in_jail(jail, op.paths[0])
        if not target.is_file():
            raise FileOpNotFound(f"no such file: {op.paths[0]!r}")
        content = target.read_text(encoding="utf-8")
        return FileOpResult(op=op, content=content, summary=f"read {op.paths[0]}")

    if op.kind == "write":
        target = resolve_in_jail(jail, op.paths[0])
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(op.content or "", encoding="utf-8")
        return FileOpResult(op=op, summary=f"wrote {op.paths[0]}")

    if op.kind == "delete":
        target = resolve_in_jail(jail, op.paths[0])
        if target.is_dir():
            shutil.rmtree(target)
        elif target.exists():
            target.unlink()
        else:
            raise FileOpNotFound(f"no such path: {op.paths[0]!r}")
        return FileOpResult(op=op, summary=f"deleted {op.paths[0]}")

    if op.kind in ("copy", "move"):
        if len(op.paths) != 2:
            raise FileOpNotFound(f"{op.kind} needs source and destination")
        src = resolve_in_jail(jail, op.paths[0])
        dst = resolve_in_jail(jail, op.paths[1])
        if not src.exists():
            raise FileOpNotFound(f"no such path: {op.paths[0]!r}")
        dst.parent.mkdir(parents=True, exist_ok=True)
        if op.kind == "copy":
            if src.is_dir():
                shutil.copytree(src, dst)
            else:
                shutil.copy2(src, dst)
        else:
            shutil.move(str(src), str(dst))
        return FileOpResult(op=op, summary=f"{op.kind} {op.paths[0]} -> {op.paths[1]}")

    raise FileOpNotFound(f"unknown operation kind {op.kind!r}")


class FileManagerAgent:
    """Worker agent wrapping execute_fileop; one jail per instance."""

    def __init__(self, token_box: ApprovalTokenBox | None = None):
        self.token_box = token_box or ApprovalTokenBox()

    def handle(self, task: TaskPayload, ctx: InvokeContext) -> AgentOutput:
        if ctx.grants.fs_jail_root is None:
            err = RuntimeError("file manager requires fs_jail_root")
            err.failure_cause = "privilege_violation"
            raise err
        op_spec = task.params.get("op")
        op = (
            FileOp(
                kind=op_spec["kind"],
                paths=tuple(op_spec["paths"]),
                content=op_spec.get("content"),
            )
            if op_spec
            else parse_fileop(task.description)
        )
        ctx.heartbeat()
        try:
            result = execute_fileop(
                op,
                ctx.grants.fs_jail_root,
                conversation_id=task.conversation_id,
                approval_token=task.approval_token,
                token_box=self.token_box,
            )
        except JailEscape as err:
            err.failure_cause = "privilege_violation"
            raise
        except (FileOpNotFound, ApprovalDenied) as err:
            err.failure_cause = type(err).__name__.lower()
            raise
        data: dict = {"entries": list(result.entries)}
        if result.content is not None:
            data["content"] = result.content
        return AgentOutput(summary=result.summary, data=data)

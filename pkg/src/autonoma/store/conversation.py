"""Flat-file conversation persistence.

Layout (one directory per conversation under the storage root):

    data/conversations/<id>/meta.json       canonical JSON record
    data/conversations/<id>/messages.jsonl  one canonical message per line
    data/conversations/<id>/events.jsonl    one canonical event per line
    data/conversations/<id>/artifacts/      agent outputs
    data/conversations/<id>/screenshots/    stub/browser captures

Writes are atomic: content goes to a temp file in the same directory and is
renamed over the target, so a crash at any point leaves the previous state
intact. Because encoding is canonical, re-persisting unchanged data is
byte-identical.
"""

from __future__ import annotations

import errno
import os
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from ..errors import Corrupt, CorruptExisting, StorageFull, StoreNotFound
from ..model import Message, WorkflowEvent
from ..model.serialize import (
    canonical_dumps,
    event_from_jsonable,
    event_to_jsonable,
    message_from_jsonable,
    message_to_jsonable,
)

_ID = re.compile(r"^[0-9a-f]{32}$")


@dataclass(frozen=True)
class ConversationRecord:
    id: str
    title: str
    created_at: int
    messages_file: str = "messages.jsonl"
    events_file: str = "events.jsonl"
    artifacts_dir: str = "artifacts"

    def to_jsonable(self) -> dict:
        return {
            "id": self.id,
            "title": self.title,
            "created_at": self.created_at,
            "messages_file": self.messages_file,
            "events_file": self.events_file,
            "artifacts_dir": self.artifacts_dir,
        }

    @classmethod
    def from_jsonable(cls, d: dict) -> "ConversationRecord":
        return cls(
            id=d["id"],
            title=d["title"],
            created_at=d["created_at"],
            messages_file=d.get("messages_file", "messages.jsonl"),
            events_file=d.get("events_file", "events.jsonl"),
            artifacts_dir=d.get("artifacts_dir", "artifacts"),
        )


class ConversationStore:
    """One writer per conversation directory; readers may read concurrently."""

    def __init__(self, root: str | Path, replace_fn: Callable[[str, str], None] = os.replace):
        self.root = Path(root)
        self._replace = replace_fn  # injectable for crash-at-rename tests

    def conversation_dir(self, conversation_id: str) -> Path:
        return self.root / "conversations" / conversation_id

    def persist(
        self,
        record: ConversationRecord,
        messages: list[Message],
        events: list[WorkflowEvent],
    ) -> dict:
        """Atomic write; returns the stored paths."""
        if not _ID.match(record.id):
            raise ValueError(f"conversation id must be 32 lowercase hex chars: {record.id!r}")
        cdir = self.conversation_dir(record.id)
        self._guard_existing(cdir, record)
        try:
            cdir.mkdir(parents=True, exist_ok=True)
            (cdir / record.artifacts_dir).mkdir(exist_ok=True)
            (cdir / "screenshots").mkdir(exist_ok=True)
            meta = canonical_dumps(record.to_jsonable()) + "\n"
            msg_lines = "".join(
                canonical_dumps(message_to_jsonable(m)) + "\n" for m in messages
            )
            evt_lines = "".join(
                canonical_dumps(event_to_jsonable(e)) + "\n" for e in events
            )
            self._atomic_write(cdir / "meta.json", meta)
            self._atomic_write(cdir / record.messages_file, msg_lines)
            self._atomic_write(cdir / record.events_file, evt_lines)
        except OSError as err:
            if err.errno == errno.ENOSPC:
                raise StorageFull(str(err)) from err
            raise
        return {
            "meta": str(cdir / "meta.json"),
            "messages": str(cdir / record.messages_file),
            "events": str(cdir / record.events_file),
            "artifacts": str(cdir / record.artifacts_dir),
        }

    def load(self, conversation_id: str) -> tuple[ConversationRecord, list[Message], list[WorkflowEvent]]:
        cdir = self.conversation_dir(conversation_id)
        if not cdir.is_dir():
            raise StoreNotFound(f"conversation {conversation_id!r} not found")
        record = ConversationRecord.from_jsonable(
            self._decode_json(cdir / "meta.json")
        )
        messages = [
            message_from_jsonable(obj)
            for obj in self._decode_jsonl(cdir / record.messages_file)
        ]
        events = []
        expect_seq = 1
        for offset, obj in self._decode_jsonl_with_offsets(cdir / record.events_file):
            event = event_from_jsonable(obj)
            if event.seq != expect_seq:
                raise Corrupt(
                    f"event log gap: expected seq {expect_seq}, got {event.seq}", offset
                )
            expect_seq += 1
            events.append(event)
        return record, messages, events

    def list_ids(self) -> list[str]:
        base = self.root / "conversations"
        if not base.is_dir():
            return []
        return sorted(p.name for p in base.iterdir() if p.is_dir())

    # -- internals ---------------------------------------------------------------

    def _guard_existing(self, cdir: Path, record: ConversationRecord) -> None:
        """Refuse to overwrite prior state that no longer decodes."""
        meta_path = cdir / "meta.json"
        if not meta_path.exists():
            return
        try:
            self._decode_json(meta_path)
            for _ in self._decode_jsonl(cdir / record.messages_file):
                pass
            for _ in self._decode_jsonl(cdir / record.events_file):
                pass
        except Corrupt as err:
            raise CorruptExisting(
                f"existing state for {record.id} is undecodable; refusing to overwrite: {err}"
            ) from err

    def _atomic_write(self, path: Path, content: str) -> None:
        tmp = path.with_name(path.name + ".tmp")
        with tmp.open("w", encoding="utf-8") as fh:
            fh.write(content)
            fh.flush()
            os.fsync(fh.fileno())
        self._replace(str(tmp), str(path))

    @staticmethod
    def _decode_json(path: Path) -> dict:
        import json

        if not path.exists():
            raise Corrupt(f"missing file {path.name}", 0)
        try:
            return json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as err:
            raise Corrupt(f"{path.name}: {err.msg}", err.pos) from None

    @classmethod
    def _decode_jsonl(cls, path: Path):
        for _, obj in cls._decode_jsonl_with_offsets(path):
            yield obj

    @staticmethod
    def _decode_jsonl_with_offsets(path: Path):
        """Yield (byte offset of line start, decoded object)."""
        import json

        if not path.exists():
            return
        offset = 0
        with path.open("rb") as fh:
            for raw in fh:
                try:
                    stripped = raw.decode("utf-8").strip()
                except UnicodeDecodeError:
                    raise Corrupt(f"{path.name}: invalid UTF-8", offset) from None
                if stripped:
                    try:
                        yield offset, json.loads(stripped)
                    except json.JSONDecodeError:
                        raise Corrupt(f"{path.name}: undecodable line", offset) from None
                offset += len(raw)

"""Hash-chained append-only audit trail.

Each record's hash is SHA-256 over the previous record's hash concatenated
with the canonical serialization of its own non-hash fields; the genesis
prev_hash is 64 zero hex chars. Any in-place mutation, deletion, or reorder
breaks the chain from that record onward, and verify reports the first bad
index.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
from dataclasses import dataclass
from pathlib import Path

from ..errors import ChainHeadMismatch, Corrupt
from ..model.serialize import canonical_dumps

GENESIS = "0" * 64


@dataclass(frozen=True)
class AuditRecord:
    seq: int
    timestamp: int
    actor: str
    action: str
    input_digest: str
    output_digest: str
    prev_hash: str
    this_hash: str

    def to_jsonable(self) -> dict:
        return {
            "seq": self.seq,
            "timestamp": self.timestamp,
            "actor": self.actor,
            "action": self.action,
            "input_digest": self.input_digest,
            "output_digest": self.output_digest,
            "prev_hash": self.prev_hash,
            "this_hash": self.this_hash,
        }

    @classmethod
    def from_jsonable(cls, d: dict) -> "AuditRecord":
        return cls(**{k: d[k] for k in (
            "seq", "timestamp", "actor", "action",
            "input_digest", "output_digest", "prev_hash", "this_hash",
        )})


def chain_hash(prev_hash: str, body: dict) -> str:
    """H(prev_hash ∥ canonical serialization of the non-hash fields)."""
    canon = canonical_dumps(
        {k: body[k] for k in ("seq", "timestamp", "actor", "action",
                              "input_digest", "output_digest")}
    )
    return hashlib.sha256((prev_hash + canon).encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class VerifyResult:
    valid: bool
    first_bad_index: int | None = None


def verify_audit(records: list[AuditRecord]) -> VerifyResult:
    """Full chain recomputation over in-memory records."""
    prev = GENESIS
    for i, rec in enumerate(records):
        if rec.prev_hash != prev or rec.seq != i + 1:
            return VerifyResult(False, i)
        expected = chain_hash(prev, rec.to_jsonable())
        if rec.this_hash != expected:
            return VerifyResult(False, i)
        prev = rec.this_hash
    return VerifyResult(True, None)


class AuditLog:
    """Single process-wide serialized appender over ``audit.jsonl``."""

    def __init__(self, root: str | Path):
        self.path = Path(root) / "audit" / "audit.jsonl"
        self._lock = threading.Lock()
        self._head = GENESIS
        self._count = 0
        if self.path.exists():
            records = self.read_all()
            if records:
                self._head = records[-1].this_hash
                self._count = len(records)

    def append(
        self,
        timestamp: int,
        actor: str,
        action: str,
        input_digest: str = "",
        output_digest: str = "",
    ) -> AuditRecord:
        """Append with the correct chain hash; fsyncs before returning."""
        with self._lock:
            tail = self._tail_hash_on_disk()
            if tail != self._head:
                raise ChainHeadMismatch(
                    f"audit head moved: expected {self._head[:12]}…, disk has {tail[:12]}…"
                )
            body = {
                "seq": self._count + 1,
                "timestamp": timestamp,
                "actor": actor,
                "action": action,
                "input_digest": input_digest,
                "output_digest": output_digest,
            }
            this_hash = chain_hash(self._head, body)
            record = AuditRecord(prev_hash=self._head, this_hash=this_hash, **body)
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.path.open("a", encoding="utf-8") as fh:
                fh.write(canonical_dumps(record.to_jsonable()) + "\n")
                fh.flush()
                os.fsync(fh.fileno())
            self._head = this_hash
            self._count += 1
            return record

    def read_all(self) -> list[AuditRecord]:
        if not self.path.exists():
            return []
        records = []
        offset = 0
        with self.path.open("rb") as fh:
            for raw in fh:
                stripped = raw.decode("utf-8", errors="replace").strip()
                if stripped:
                    try:
                        records.append(AuditRecord.from_jsonable(json.loads(stripped)))
                    except (json.JSONDecodeError, KeyError, TypeError):
                        raise Corrupt("audit.jsonl: undecodable record", offset) from None
                offset += len(raw)
        return records

    def verify(self) -> VerifyResult:
        """Full chain recomputation; an undecodable line is a tamper at its index."""
        if not self.path.exists():
            return VerifyResult(True, None)
        prev = GENESIS
        index = 0
        with self.path.open("rb") as fh:
            for raw in fh:
                stripped = raw.decode("utf-8", errors="replace").strip()
                if not stripped:
                    continue
                try:
                    rec = AuditRecord.from_jsonable(json.loads(stripped))
                except (json.JSONDecodeError, KeyError, TypeError):
                    return VerifyResult(False, index)
                if (
                    rec.prev_hash != prev
                    or rec.seq != index + 1
                    or rec.this_hash != chain_hash(prev, rec.to_jsonable())
                ):
                    return VerifyResult(False, index)
                prev = rec.this_hash
                index += 1
        return VerifyResult(True, None)

    def _tail_hash_on_disk(self) -> str:
        if not self.path.exists() or self.path.stat().st_size == 0:
            return GENESIS
        last = b""
        with self.path.open("rb") as fh:
            for raw in fh:
                if raw.strip():
                    last = raw
        try:
            return json.loads(last.decode("utf-8"))["this_hash"]
        except Exception:
            return "<unreadable>"

"""Deterministic scripted completion backend for offline tests and replay.

A script is an ordered list of entries {match, response}. Entries are
consumed strictly in order; ``match`` is either ``"*"`` (wildcard, lenient
fixtures) or a request fingerprint (strict regression mode). The same script
run twice yields identical completion sequences by construction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from ..errors import FingerprintMismatch, ScriptExhausted
from .base import Backend, Completion, CompletionRequest, fingerprint

WILDCARD = "*"


@dataclass(frozen=True)
class ScriptEntry:
    match: str
    response: str


class ProviderScript:
    """Ordered, single-consumer response script."""

    def __init__(self, entries: list[ScriptEntry]):
        self.entries = list(entries)
        self.cursor = 0

    @classmethod
    def of(cls, *responses: str) -> "ProviderScript":
        return cls([ScriptEntry(WILDCARD, r) for r in responses])

    @classmethod
    def load(cls, path: str | Path) -> "ProviderScript":
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls([ScriptEntry(e["match"], e["response"]) for e in raw])

    def dump(self, path: str | Path) -> None:
        data = [{"match": e.match, "response": e.response} for e in self.entries]
        Path(path).write_text(
            json.dumps(data, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
        )

    def next(self, fp: str) -> str:
        if self.cursor >= len(self.entries):
            raise ScriptExhausted(f"script consumed after {self.cursor} entries")
        entry = self.entries[self.cursor]
        if entry.match != WILDCARD and entry.match != fp:
            raise FingerprintMismatch(
                f"entry {self.cursor} expects fingerprint {entry.match[:12]}…, "
                f"request has {fp[:12]}…"
            )
        self.cursor += 1
        return entry.response

    def exhausted(self) -> bool:
        return self.cursor >= len(self.entries)


class ScriptedBackend(Backend):
    def __init__(self, script: ProviderScript):
        self.script = script

    def complete(self, req: CompletionRequest) -> Completion:
        text = self.script.next(fingerprint(req.messages))
        return Completion(text=text, usage={"entries_consumed": self.script.cursor})


class RecordingBackend(Backend):
    """Wraps a live backend, recording a strict script fit for replay.

    The recorder writes ``provider_trace.json`` via :meth:`dump`; replaying
    the trace through a ScriptedBackend reproduces the identical completion
    sequence. Several recorders (one per role) may share one ``trace`` list
    so the dump preserves global call order.
    """

    def __init__(self, inner: Backend, trace: list[ScriptEntry] | None = None):
        self.inner = inner
        self.trace: list[ScriptEntry] = trace if trace is not None else []

    def complete(self, req: CompletionRequest) -> Completion:
        completion = self.inner.complete(req)
        self.trace.append(ScriptEntry(fingerprint(req.messages), completion.text))
        return completion

    def dump(self, path: str | Path) -> None:
        ProviderScript(self.trace).dump(path)

"""Chat-completion abstraction.

Every model interaction in the runtime goes through a ProviderRouter: callers
name the system role that is asking (coordinator, planner, agent, reporter)
and the router picks the configured backend for that role. No other module
performs model I/O — tests enforce this with a tripwire backend.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Protocol

from ..errors import ProviderUnavailable

ROLE_CONTEXTS = ("coordinator", "planner", "agent", "reporter")


@dataclass(frozen=True)
class CompletionParams:
    # temperature defaults to 0 everywhere: determinism first
    temperature: float = 0.0
    max_output_chars: int = 16384


@dataclass(frozen=True)
class CompletionRequest:
    role_context: str
    messages: tuple[tuple[str, str], ...]  # (role, content) pairs, ordered
    params: CompletionParams = field(default_factory=CompletionParams)

    def __post_init__(self) -> None:
        if self.role_context not in ROLE_CONTEXTS:
            raise ValueError(f"unknown role_context {self.role_context!r}")
        if not self.messages:
            raise ValueError("messages must be non-empty")


@dataclass(frozen=True)
class Completion:
    text: str
    usage: dict


def fingerprint(messages: tuple[tuple[str, str], ...]) -> str:
    """Stable token for a message list.

    Sensitive to content and order, insensitive to anything else (timestamps
    and ids never enter the hash because they never enter the messages).
    """
    canon = json.dumps(
        [[role, content] for role, content in messages],
        sort_keys=True,
        separators=(",", ":"),
        ensure_ascii=False,
    )
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


class Backend(Protocol):
    def complete(self, req: CompletionRequest) -> Completion: ...


class TripwireBackend:
    """Backend that fails loudly; proves a code path performs no model I/O."""

    def __init__(self):
        self.calls = 0

    def complete(self, req: CompletionRequest) -> Completion:
        self.calls += 1
        raise AssertionError(f"unexpected provider call from role {req.role_context}")


class ProviderRouter:
    """role_context -> backend. One configured backend per role."""

    def __init__(self, backends: dict[str, Backend]):
        self._backends = dict(backends)

    @classmethod
    def single(cls, backend: Backend) -> "ProviderRouter":
        return cls({role: backend for role in ROLE_CONTEXTS})

    def complete(self, req: CompletionRequest) -> Completion:
        backend = self._backends.get(req.role_context)
        if backend is None:
            raise ProviderUnavailable(f"no backend configured for role {req.role_context!r}")
        return backend.complete(req)

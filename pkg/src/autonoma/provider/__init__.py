"""Completion provider abstraction and the deterministic scripted backend."""

from .base import (
    ROLE_CONTEXTS,
    Backend,
    Completion,
    CompletionParams,
    CompletionRequest,
    ProviderRouter,
    TripwireBackend,
    fingerprint,
)
from .http import HttpBackend
from .scripted import (
    WILDCARD,
    ProviderScript,
    RecordingBackend,
    ScriptedBackend,
    ScriptEntry,
)

__all__ = [
    "ROLE_CONTEXTS",
    "WILDCARD",
    "Backend",
    "Completion",
    "CompletionParams",
    "CompletionRequest",
    "HttpBackend",
    "ProviderRouter",
    "ProviderScript",
    "RecordingBackend",
    "ScriptedBackend",
    "ScriptEntry",
    "TripwireBackend",
    "fingerprint",
]

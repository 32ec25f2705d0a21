"""Persistence: conversation transcripts, event logs, and the audit chain."""

from .audit import GENESIS, AuditLog, AuditRecord, VerifyResult, chain_hash, verify_audit
from .conversation import ConversationRecord, ConversationStore

__all__ = [
    "GENESIS",
    "AuditLog",
    "AuditRecord",
    "ConversationRecord",
    "ConversationStore",
    "VerifyResult",
    "chain_hash",
    "verify_audit",
]

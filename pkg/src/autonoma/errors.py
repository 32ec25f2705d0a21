"""Exception hierarchy shared across the runtime.

Errors fall into three families: contract violations a caller can act on
(plan validation, schema violations), engine bugs that should never surface
in normal operation (IllegalTransition, ChainHeadMismatch), and recorded
failure causes that are returned as task outcomes rather than raised.
"""

from __future__ import annotations


class AutonomaError(Exception):
    """Base class for all runtime errors."""


# --- workflow model ---------------------------------------------------------


class PlanValidationError(AutonomaError):
    """A plan violated one of its structural invariants."""


class EmptyPlan(PlanValidationError):
    pass


class DuplicateStepId(PlanValidationError):
    pass


class UnknownCapability(PlanValidationError):
    pass


class CyclicDependency(PlanValidationError):
    """A step depends on an id not declared earlier (cycle or forward ref)."""


class IllegalTransition(AutonomaError):
    """The (state, event) pair is not in the transition table.

    Signals an engine bug, never a user error: the engine must only append
    events the current state accepts.
    """


class GapInSequence(AutonomaError):
    """Event seq is not exactly previous seq + 1."""


# --- provider ---------------------------------------------------------------


class ProviderUnavailable(AutonomaError):
    """Backend could not serve the completion after bounded retries."""


class ScriptExhausted(AutonomaError):
    """A scripted provider ran out of entries."""


class FingerprintMismatch(AutonomaError):
    """Strict scripted mode: request fingerprint differs from the entry's."""


# --- planner ----------------------------------------------------------------


class SchemaViolation(AutonomaError):
    """Plan document failed the strict schema; carries a machine path."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.reason = message


class PlanParseError(AutonomaError):
    """Provider output could not be parsed even after the repair round."""


# --- agent kit --------------------------------------------------------------


class DuplicateAgentId(AutonomaError):
    pass


class GrantLintFailure(AutonomaError):
    """Manifest grants are not minimal/consistent for its capabilities."""

    def __init__(self, rule: str, message: str):
        super().__init__(f"{rule}: {message}")
        self.rule = rule


class NoCapableAgent(AutonomaError):
    """No registered agent declares the required capability."""


# --- builtin agents ---------------------------------------------------------


class InvalidQuery(AutonomaError):
    pass


class AllToolsFailed(AutonomaError):
    """Every search tool in the budget errored out."""


class ExecDenied(AutonomaError):
    """Script execution requested without the allow_exec grant."""


class NetworkDenied(AutonomaError):
    """Network access requested outside the grants or host allowlist."""


class SandboxTimeout(AutonomaError):
    """Execution exceeded max_runtime."""


class JailEscape(AutonomaError):
    """A path normalized to a location outside the jail root."""


class FileOpNotFound(AutonomaError):
    pass


class ApprovalDenied(AutonomaError):
    """Approval token invalid, expired, reused, or the user denied."""


class NothingToReport(AutonomaError):
    pass


# --- store ------------------------------------------------------------------


class StorageFull(AutonomaError):
    pass


class CorruptExisting(AutonomaError):
    """Refusing to overwrite prior state that no longer decodes."""


class StoreNotFound(AutonomaError):
    pass


class Corrupt(AutonomaError):
    """Stored data failed to decode; carries the byte offset of the bad line."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class ChainHeadMismatch(AutonomaError):
    """Audit chain head moved underneath an appender (concurrent writer)."""


# --- gateway ----------------------------------------------------------------


class NoPendingApproval(AutonomaError):
    pass


class DigestMismatch(AutonomaError):
    pass

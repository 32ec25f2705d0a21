"""Plugin substrate: manifests, registry, hooks, and bounded invocation."""

from .guards import require_exec, require_jail, require_network
from .hooks import Hook, HookAbort, HookAction, HookBoard, HookStage
from .invoke import (
    CAUSE_PANIC,
    CAUSE_TIMEOUT,
    FAILED,
    OK,
    PENDING_APPROVAL,
    InvokeOutcome,
    invoke,
)
from .manifest import (
    AgentManifest,
    PrivilegeGrants,
    lint_grants,
    load_manifest,
    manifest_from_jsonable,
    manifest_to_jsonable,
)
from .registry import AgentRegistry, RegisteredAgent
from .subproc import PluginProtocolError, SubprocessAgent, load_plugin
from .types import Agent, AgentOutput, ApprovalRequired, InvokeContext, TaskPayload

__all__ = [
    "CAUSE_PANIC",
    "CAUSE_TIMEOUT",
    "FAILED",
    "OK",
    "PENDING_APPROVAL",
    "Agent",
    "AgentManifest",
    "AgentOutput",
    "AgentRegistry",
    "ApprovalRequired",
    "Hook",
    "HookAbort",
    "HookAction",
    "HookBoard",
    "HookStage",
    "InvokeContext",
    "InvokeOutcome",
    "PluginProtocolError",
    "PrivilegeGrants",
    "RegisteredAgent",
    "SubprocessAgent",
    "TaskPayload",
    "invoke",
    "lint_grants",
    "require_exec",
    "require_jail",
    "require_network",
    "load_manifest",
    "load_plugin",
    "manifest_from_jsonable",
    "manifest_to_jsonable",
]

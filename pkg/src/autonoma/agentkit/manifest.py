"""Agent manifests, privilege grants, and the grant linter.

The linter enforces least privilege as a fixed rule table (editable only by
rebuild):

    R1  capabilities non-empty
    R2  file_ops capability requires fs_jail_root
    R3  code_exec capability requires allow_exec
    R4  allow_exec requires the code_exec capability
    R5  code_exec capability requires fs_jail_root (scripts run inside a jail)
    R6  allow_network requires a network-using capability (web_search, browser)
    R7  network_allowlist entries require allow_network
    R8  max_runtime_ms and max_output_bytes must be positive
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from ..errors import GrantLintFailure

NETWORK_CAPABILITIES = frozenset({"web_search", "browser"})


@dataclass(frozen=True)
class PrivilegeGrants:
    """File access confined to fs_jail_root; exec and network off by default."""

    fs_jail_root: str | None = None
    allow_exec: bool = False
    allow_network: bool = False
    network_allowlist: tuple[str, ...] = ()
    max_runtime_ms: int = 30_000
    max_output_bytes: int = 1_000_000

    def is_not_wider_than(self, other: "PrivilegeGrants") -> bool:
        """True iff every privilege here is within ``other``'s grants."""
        if self.fs_jail_root != other.fs_jail_root and self.fs_jail_root is not None:
            return False
        if self.allow_exec and not other.allow_exec:
            return False
        if self.allow_network and not other.allow_network:
            return False
        if not set(self.network_allowlist) <= set(other.network_allowlist):
            return False
        return (
            self.max_runtime_ms <= other.max_runtime_ms
            and self.max_output_bytes <= other.max_output_bytes
        )


@dataclass(frozen=True)
class AgentManifest:
    id: str
    display_name: str
    capabilities: frozenset
    grants: PrivilegeGrants
    heartbeat_capable: bool = True
    description: str = ""


def lint_grants(manifest: AgentManifest) -> None:
    """Raise GrantLintFailure on the first violated rule."""
    caps, grants = manifest.capabilities, manifest.grants
    if not caps:
        raise GrantLintFailure("R1", f"agent {manifest.id!r} declares no capabilities")
    if "file_ops" in caps and grants.fs_jail_root is None:
        raise GrantLintFailure("R2", f"agent {manifest.id!r} has file_ops but no fs_jail_root")
    if "code_exec" in caps and not grants.allow_exec:
        raise GrantLintFailure("R3", f"agent {manifest.id!r} has code_exec but not allow_exec")
    if grants.allow_exec and "code_exec" not in caps:
        raise GrantLintFailure("R4", f"agent {manifest.id!r} grants allow_exec without code_exec")
    if "code_exec" in caps and grants.fs_jail_root is None:
        raise GrantLintFailure("R5", f"agent {manifest.id!r} has code_exec but no fs_jail_root")
    if grants.allow_network and not (caps & NETWORK_CAPABILITIES):
        raise GrantLintFailure(
            "R6", f"agent {manifest.id!r} grants allow_network without a network capability"
        )
    if grants.network_allowlist and not grants.allow_network:
        raise GrantLintFailure(
            "R7", f"agent {manifest.id!r} has a network allowlist but not allow_network"
        )
    if grants.max_runtime_ms <= 0 or grants.max_output_bytes <= 0:
        raise GrantLintFailure("R8", f"agent {manifest.id!r} has non-positive resource bounds")


def manifest_to_jsonable(m: AgentManifest) -> dict:
    return {
        "id": m.id,
        "display_name": m.display_name,
        "capabilities": sorted(m.capabilities),
        "grants": {
            "fs_jail_root": m.grants.fs_jail_root,
            "allow_exec": m.grants.allow_exec,
            "allow_network": m.grants.allow_network,
            "network_allowlist": list(m.grants.network_allowlist),
            "max_runtime_ms": m.grants.max_runtime_ms,
            "max_output_bytes": m.grants.max_output_bytes,
        },
        "heartbeat_capable": m.heartbeat_capable,
        "description": m.description,
    }


def manifest_from_jsonable(d: dict) -> AgentManifest:
    g = d.get("grants", {})
    return AgentManifest(
        id=d["id"],
        display_name=d.get("display_name", d["id"]),
        capabilities=frozenset(d["capabilities"]),
        grants=PrivilegeGrants(
            fs_jail_root=g.get("fs_jail_root"),
            allow_exec=g.get("allow_exec", False),
            allow_network=g.get("allow_network", False),
            network_allowlist=tuple(g.get("network_allowlist", ())),
            max_runtime_ms=g.get("max_runtime_ms", 30_000),
            max_output_bytes=g.get("max_output_bytes", 1_000_000),
        ),
        heartbeat_capable=d.get("heartbeat_capable", True),
        description=d.get("description", ""),
    )


def load_manifest(path: str | Path) -> AgentManifest:
    return manifest_from_jsonable(json.loads(Path(path).read_text(encoding="utf-8")))

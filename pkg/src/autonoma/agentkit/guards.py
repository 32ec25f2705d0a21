"""Privilege guards: the single place agents' grants are checked at use time.

Capability helpers (jail resolution, script execution, network access) route
through these, so effective privileges during an invoke can never exceed the
manifest grants regardless of code path.
"""

from __future__ import annotations

from fnmatch import fnmatch
from pathlib import Path

from ..errors import ExecDenied, GrantLintFailure, NetworkDenied
from .manifest import PrivilegeGrants


def require_exec(grants: PrivilegeGrants) -> None:
    if not grants.allow_exec:
        raise ExecDenied("allow_exec not granted")


def require_jail(grants: PrivilegeGrants) -> Path:
    if grants.fs_jail_root is None:
        raise GrantLintFailure("R2", "no fs_jail_root granted")
    return Path(grants.fs_jail_root)


def require_network(grants: PrivilegeGrants, host: str) -> None:
    """Network access needs the grant; a non-empty allowlist confines hosts."""
    if not grants.allow_network:
        raise NetworkDenied(f"network access to {host!r} not granted")
    if grants.network_allowlist and not any(
        fnmatch(host, pattern) for pattern in grants.network_allowlist
    ):
        raise NetworkDenied(f"host {host!r} not in the network allowlist")

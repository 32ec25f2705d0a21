"""Filesystem jail: every file effect is confined to one root directory.

Interface paths are jail-relative with ``/`` separators regardless of host
platform; backslashes are treated as separators and normalized. Containment
is checked after full normalization and symlink resolution, so dot-dot
segments, absolute paths, drive letters, and symlinks out of the jail all
raise JailEscape before any filesystem effect.
"""

from __future__ import annotations

import os
import re
from pathlib import Path

from ..errors import JailEscape

_DRIVE = re.compile(r"^[A-Za-z]:")


def resolve_in_jail(jail_root: str | Path, user_path: str) -> Path:
    """Map a jail-relative path to a host path, or raise JailEscape."""
    raw = str(user_path).replace("\\", "/")
    if raw.startswith("/") or _DRIVE.match(raw):
        raise JailEscape(f"absolute path {user_path!r} not allowed")
    if "\x00" in raw:
        raise JailEscape(f"path {user_path!r} contains a NUL byte")
    norm = os.path.normpath(raw)
    if norm == ".." or norm.startswith("../"):
        raise JailEscape(f"path {user_path!r} escapes the jail after normalization")

    root = Path(jail_root).resolve()
    target = (root / norm) if norm != "." else root

    # resolve symlinks: the whole path if it exists, else its deepest
    # existing ancestor (covers symlinked directories on the way to a
    # not-yet-created write destination)
    probe = target
    while not probe.exists() and probe != root:
        probe = probe.parent
    resolved = probe.resolve()
    try:
        resolved.relative_to(root)
    except ValueError:
        raise JailEscape(f"path {user_path!r} resolves outside the jail") from None
    return target


def jail_relative(jail_root: str | Path, host_path: Path) -> str:
    """Inverse mapping, for reporting paths back over the wire."""
    root = Path(jail_root).resolve()
    return host_path.resolve().relative_to(root).as_posix()

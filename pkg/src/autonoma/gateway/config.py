"""Service configuration: file, environment overrides, CLI flags.

The config file is a small key/value document (grammar documented in the
README): ``[section]`` headers, ``key = value`` lines, values are quoted
strings, integers, floats, true/false, or ``[comma, separated, lists]``;
``#`` starts a comment. Environment variables ``AUTONOMA_<SECTION>_<KEY>``
override file values; CLI flags override both.
"""

from __future__ import annotations

import ipaddress
import os
import re
from dataclasses import dataclass, field
from pathlib import Path

from ..supervisor.results import ExecutionPolicy
from .ipfilter import DEFAULT_ALLOWLIST

_SECTION = re.compile(r"^\[([A-Za-z0-9_.]+)\]$")
_KEYVAL = re.compile(r"^([A-Za-z0-9_]+)\s*=\s*(.+)$")


def _parse_value(raw: str):
    raw = raw.strip()
    if raw.startswith("[") and raw.endswith("]"):
        inner = raw[1:-1].strip()
        return [_parse_value(part) for part in inner.split(",")] if inner else []
    if raw.startswith('"') and raw.endswith('"') and len(raw) >= 2:
        return raw[1:-1]
    if raw in ("true", "false"):
        return raw == "true"
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        pass
    return raw  # bare string


def _strip_comment(line: str) -> str:
    """Drop a trailing comment, respecting # characters inside quotes."""
    in_quotes = False
    for i, ch in enumerate(line):
        if ch == '"':
            in_quotes = not in_quotes
        elif ch == "#" and not in_quotes:
            return line[:i]
    return line


def parse_config_text(text: str) -> dict:
    """{section: {key: value}}; keys before any section land in 'server'."""
    out: dict = {}
    section = "server"
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = _strip_comment(line).strip()
        if not line:
            continue
        m = _SECTION.match(line)
        if m:
            section = m.group(1)
            continue
        m = _KEYVAL.match(line)
        if not m:
            raise ValueError(f"config line {lineno}: expected 'key = value', got {line!r}")
        out.setdefault(section, {})[m.group(1)] = _parse_value(m.group(2))
    return out


@dataclass
class ServiceConfig:
    bind_host: str = "127.0.0.1"
    bind_port: int = 8420
    allowlist: tuple = DEFAULT_ALLOWLIST
    allow_nonlocal_bind: bool = False
    pairing_ttl_ms: int = 10 * 60 * 1000
    body_cap_bytes: int = 1 << 20
    storage_root: str = "data"
    policy: ExecutionPolicy = field(default_factory=ExecutionPolicy)
    provider_backends: dict = field(default_factory=dict)  # role -> backend spec

    def validate_bind(self) -> None:
        """Refuse to start on a non-allowlisted interface without the override."""
        if not self.allowlist:
            raise ValueError("allowlist must be non-empty")
        if self.allow_nonlocal_bind or self.bind_host in ("0.0.0.0", "::"):
            # binding all interfaces is the operator's explicit LAN posture;
            # per-request filtering still applies
            if self.bind_host in ("0.0.0.0", "::") and not self.allow_nonlocal_bind:
                raise ValueError(
                    "binding all interfaces requires allow_nonlocal_bind = true"
                )
            return
        addr = ipaddress.ip_address(self.bind_host)
        blocks = [ipaddress.ip_network(b, strict=False) for b in self.allowlist]
        if not any(addr.version == b.version and addr in b for b in blocks):
            raise ValueError(
                f"bind address {self.bind_host} is outside the allowlist; "
                "set allow_nonlocal_bind = true to override"
            )


def _apply_section(config: ServiceConfig, data: dict) -> None:
    server = data.get("server", {})
    if "bind" in server:
        host, _, port = str(server["bind"]).rpartition(":")
        config.bind_host = host or str(server["bind"])
        if port:
            config.bind_port = int(port)
    config.bind_host = server.get("host", config.bind_host)
    config.bind_port = int(server.get("port", config.bind_port))
    if "allowlist" in server:
        config.allowlist = tuple(str(x) for x in server["allowlist"])
    config.allow_nonlocal_bind = bool(
        server.get("allow_nonlocal_bind", config.allow_nonlocal_bind)
    )
    config.pairing_ttl_ms = int(server.get("pairing_ttl_ms", config.pairing_ttl_ms))
    config.body_cap_bytes = int(server.get("body_cap_bytes", config.body_cap_bytes))
    config.storage_root = str(server.get("storage_root", config.storage_root))

    if "policy" in data:
        merged = config.policy.to_jsonable()
        merged.update(data["policy"])
        config.policy = ExecutionPolicy.from_jsonable(merged)

    for section, values in data.items():
        if section.startswith("providers."):
            role = section.split(".", 1)[1]
            config.provider_backends[role] = dict(values)


def _env_overrides(environ: dict) -> dict:
    out: dict = {}
    for key, raw in environ.items():
        if not key.startswith("AUTONOMA_"):
            continue
        parts = key[len("AUTONOMA_"):].lower().split("_", 1)
        if len(parts) != 2:
            continue
        section, name = parts
        out.setdefault(section, {})[name] = _parse_value(raw)
    return out


def load_config(
    path: str | Path | None = None,
    environ: dict | None = None,
    cli_overrides: dict | None = None,
) -> ServiceConfig:
    config = ServiceConfig()
    if path is not None:
        _apply_section(config, parse_config_text(Path(path).read_text(encoding="utf-8")))
    _apply_section(config, _env_overrides(environ if environ is not None else dict(os.environ)))
    if cli_overrides:
        if cli_overrides.get("bind"):
            host, _, port = cli_overrides["bind"].rpartition(":")
            config.bind_host = host or cli_overrides["bind"]
            if port:
                config.bind_port = int(port)
        if cli_overrides.get("allow_cidr"):
            config.allowlist = tuple(cli_overrides["allow_cidr"])
    return config

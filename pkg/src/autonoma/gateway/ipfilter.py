"""LAN isolation: CIDR allowlist evaluated before any request parsing."""

from __future__ import annotations

import ipaddress

ALLOW = "Allow"
DENY = "Deny"

DEFAULT_ALLOWLIST = (
    "192.168.0.0/16",
    "10.0.0.0/8",
    "172.16.0.0/12",
    "127.0.0.0/8",
)


def parse_allowlist(blocks: list[str]) -> tuple:
    return tuple(ipaddress.ip_network(b, strict=False) for b in blocks)


def ip_filter(remote_address: str, allowlist: tuple) -> str:
    """Allow iff the address is inside any allowlisted CIDR block."""
    try:
        addr = ipaddress.ip_address(remote_address)
    except ValueError:
        return DENY
    for block in allowlist:
        if addr.version == block.version and addr in block:
            return ALLOW
    return DENY


class IpFilterMiddleware:
    """Raw ASGI wrapper: a denied address never reaches the application,
    so no parsing, storage write, or audit entry can happen for it."""

    def __init__(self, app, allowlist: tuple):
        self.app = app
        self.allowlist = allowlist
        self.denied_count = 0

    async def __call__(self, scope, receive, send):
        if scope["type"] not in ("http", "websocket"):
            await self.app(scope, receive, send)
            return
        client = scope.get("client")
        remote = client[0] if client else ""
        if ip_filter(remote, self.allowlist) != ALLOW:
            self.denied_count += 1
            if scope["type"] == "http":
                await send(
                    {
                        "type": "http.response.start",
                        "status": 403,
                        "headers": [(b"content-type", b"application/json")],
                    }
                )
                await send(
                    {
                        "type": "http.response.body",
                        "body": b'{"detail":"address not allowlisted"}',
                    }
                )
            else:
                await send({"type": "websocket.close", "code": 4403})
            return
        await self.app(scope, receive, send)

"""QR pairing and bearer-token authentication.

A pairing token is 32 random bytes, base64url. The first client to present
it owns it (single binding); afterwards the token doubles as that client's
bearer token. Tokens expire TTL seconds after issue unless bound.
"""

from __future__ import annotations

import base64
import secrets
import threading
from dataclasses import dataclass

from ..clock import Clock, WallClock


@dataclass
class PairingSession:
    token: str
    issued_at: int
    ttl_ms: int
    bound_client: str | None = None


def qr_payload(host: str, port: int, token: str) -> str:
    return f"autonoma://pair?host={host}&port={port}&token={token}"


class PairingAuthority:
    def __init__(self, ttl_ms: int = 10 * 60 * 1000, clock: Clock | None = None):
        self.ttl_ms = ttl_ms
        self.clock = clock or WallClock()
        self._lock = threading.Lock()
        self._sessions: dict[str, PairingSession] = {}

    def issue(self, host: str, port: int) -> tuple[str, str]:
        """New single-binding token and its QR payload string.

        Only ever invoked from the service host console (CLI --print-qr or
        startup banner), never over the network.
        """
        token = base64.urlsafe_b64encode(secrets.token_bytes(32)).decode().rstrip("=")
        with self._lock:
            self._sessions[token] = PairingSession(
                token=token, issued_at=self.clock.now_ms(), ttl_ms=self.ttl_ms
            )
        return token, qr_payload(host, port, token)

    def authenticate(self, token: str | None, client_id: str) -> bool:
        """True iff the token exists, is unexpired, and belongs to this client."""
        if not token:
            return False
        with self._lock:
            session = self._sessions.get(token)
            if session is None:
                return False
            if session.bound_client is None:
                if self.clock.now_ms() - session.issued_at > session.ttl_ms:
                    return False
                session.bound_client = client_id  # first presenter owns it
                return True
            return session.bound_client == client_id

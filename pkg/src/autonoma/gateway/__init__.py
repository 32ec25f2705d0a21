"""LAN-confined gateway: prompt submission, event streaming, pairing, approvals."""

from .auth import PairingAuthority, PairingSession, qr_payload
from .config import ServiceConfig, load_config, parse_config_text
from .ipfilter import ALLOW, DEFAULT_ALLOWLIST, DENY, IpFilterMiddleware, ip_filter, parse_allowlist
from .service import ConversationHandle, GatewayService, create_app

__all__ = [
    "ALLOW",
    "DEFAULT_ALLOWLIST",
    "DENY",
    "ConversationHandle",
    "GatewayService",
    "IpFilterMiddleware",
    "PairingAuthority",
    "PairingSession",
    "ServiceConfig",
    "create_app",
    "ip_filter",
    "load_config",
    "parse_allowlist",
    "parse_config_text",
    "qr_payload",
]

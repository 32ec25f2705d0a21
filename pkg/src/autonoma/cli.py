"""Top-level command line.

    autonoma serve [--bind HOST:PORT] [--config FILE] [--allow-cidr CIDR]...
                   [--print-qr] [--storage DIR]
    autonoma bench run|verify ...      (same as the autonoma-bench script)
    autonoma print-qr [--config FILE]  (host console only)

`serve` starts the LAN gateway with the builtin worker agents and whatever
provider backends the config names (scripted backends when none are
configured, so the service runs fully offline out of the box).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bench.cli import main as bench_main


def _add_serve_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--bind", help="host:port to listen on")
    parser.add_argument("--config", help="path to the service config file")
    parser.add_argument(
        "--allow-cidr",
        action="append",
        default=None,
        help="allowlisted CIDR block (repeatable; replaces the default LAN set)",
    )
    parser.add_argument("--storage", help="storage root directory")
    parser.add_argument(
        "--print-qr", action="store_true", help="print a pairing QR payload at startup"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="autonoma", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    serve = sub.add_parser("serve", help="run the LAN gateway")
    _add_serve_flags(serve)
    qr = sub.add_parser("print-qr", help="issue and print a pairing token")
    qr.add_argument("--config", help="path to the service config file")
    sub.add_parser("bench", help="benchmark harness (see `autonoma bench run -h`)",
                   add_help=False)
    return parser


def _build_service(args):
    from .agentkit import AgentRegistry
    from .agents import ApprovalTokenBox, register_builtin_agents
    from .coordinator import Coordinator
    from .gateway import GatewayService, ServiceConfig, load_config
    from .planner import Planner
    from .provider import (
        HttpBackend,
        ProviderRouter,
        ProviderScript,
        ScriptedBackend,
        ROLE_CONTEXTS,
    )
    from .runtime import PipelineConfig, WorkflowPipeline

    overrides = {"bind": args.bind, "allow_cidr": args.allow_cidr}
    config = load_config(args.config, cli_overrides=overrides)
    if args.storage:
        config.storage_root = args.storage
    config.validate_bind()

    backends = {}
    for role in ROLE_CONTEXTS:
        spec = config.provider_backends.get(role, {})
        kind = spec.get("kind", "scripted")
        if kind == "http":
            backends[role] = HttpBackend(
                base_url=spec["base_url"],
                model=spec.get("model", ""),
                api_key=spec.get("api_key", ""),
            )
        elif kind == "scripted":
            script = spec.get("script")
            entries = ProviderScript.load(script) if script else ProviderScript.of()
            backends[role] = ScriptedBackend(entries)
        else:
            raise SystemExit(f"unknown provider backend kind {kind!r} for role {role}")

    shared_trace = None
    if any(
        config.provider_backends.get(role, {}).get("record", False) for role in ROLE_CONTEXTS
    ):
        from .provider import RecordingBackend

        shared_trace = []
        backends = {role: RecordingBackend(b, trace=shared_trace) for role, b in backends.items()}
    router = ProviderRouter(backends)

    storage_root = Path(config.storage_root)
    jail_root = storage_root / "workspace"
    jail_root.mkdir(parents=True, exist_ok=True)
    token_box = ApprovalTokenBox()
    registry = AgentRegistry()
    register_builtin_agents(registry, jail_root, token_box=token_box)

    pipeline = WorkflowPipeline(
        coordinator=Coordinator(router),
        planner=Planner(router),
        registry=registry,
        config=PipelineConfig(policy=config.policy),
        token_box=token_box,
    )
    return GatewayService(config, pipeline, shared_trace=shared_trace)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0] == "bench":
        return bench_main(argv[1:])
    args = build_parser().parse_args(argv)

    if args.command == "print-qr":
        ns = argparse.Namespace(bind=None, config=args.config, allow_cidr=None,
                                storage=None, print_qr=True)
        service = _build_service(ns)
        token, payload = service.issue_pairing()
        print(payload)
        return 0

    if args.command == "serve":
        import uvicorn

        from .gateway import create_app

        service = _build_service(args)
        if args.print_qr:
            _, payload = service.issue_pairing()
            print(payload)
        app = create_app(service)
        uvicorn.run(
            app,
            host=service.config.bind_host,
            port=service.config.bind_port,
            log_level="info",
        )
        return 0

    return 2


if __name__ == "__main__":
    sys.exit(main())

"""Out-of-process plugin adapter.

Protocol: newline-delimited JSON over the plugin's standard streams. The
parent writes one {"type": "task", "payload": {...}} line; the child answers
with any number of {"type": "heartbeat"} lines followed by exactly one
{"type": "result", "payload": {summary, artifacts, data}} or
{"type": "error", "payload": {cause, message}} line. The manifest lives in a
JSON file next to the plugin executable (``manifest.json``).
"""

from __future__ import annotations

import json
import subprocess
import threading
from pathlib import Path

from .manifest import AgentManifest, load_manifest
from .types import AgentOutput, InvokeContext, TaskPayload


class PluginProtocolError(Exception):
    pass


class SubprocessAgent:
    """Runs one task per plugin process; heartbeats forwarded to the context."""

    def __init__(self, argv: list[str], cwd: str | None = None):
        self.argv = list(argv)
        self.cwd = cwd

    def handle(self, task: TaskPayload, ctx: InvokeContext) -> AgentOutput:
        proc = subprocess.Popen(
            self.argv,
            cwd=self.cwd,
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            stderr=subprocess.DEVNULL,
            text=True,
        )
        # safety net: even if this thread is abandoned by an invoke timeout,
        # the child must not outlive the runtime bound (EOF unblocks the read)
        grace_s = ctx.grants.max_runtime_ms / 1000.0 + 1.0
        killer = threading.Timer(grace_s, proc.kill)
        killer.daemon = True
        killer.start()
        try:
            line = json.dumps({"type": "task", "payload": task.to_jsonable()})
            assert proc.stdin is not None and proc.stdout is not None
            proc.stdin.write(line + "\n")
            proc.stdin.flush()

            for raw in proc.stdout:
                raw = raw.strip()
                if not raw:
                    continue
                msg = json.loads(raw)
                kind = msg.get("type")
                if kind == "heartbeat":
                    ctx.heartbeat()
                elif kind == "result":
                    p = msg.get("payload", {})
                    return AgentOutput(
                        summary=p.get("summary", ""),
                        artifacts=tuple(p.get("artifacts", ())),
                        data=p.get("data", {}),
                    )
                elif kind == "error":
                    p = msg.get("payload", {})
                    raise PluginProtocolError(p.get("message", p.get("cause", "plugin error")))
                else:
                    raise PluginProtocolError(f"unknown message type {kind!r}")
            raise PluginProtocolError("plugin exited without a result")
        finally:
            killer.cancel()
            if proc.poll() is None:
                proc.kill()
            proc.wait()


def load_plugin(plugin_dir: str | Path) -> tuple[AgentManifest, SubprocessAgent]:
    """A plugin directory holds manifest.json and the executable it names.

    The manifest's ``display_name`` doubles as documentation; the executable
    is declared under the non-standard key ``entry`` (argv list) in the same
    file, resolved relative to the directory.
    """
    plugin_dir = Path(plugin_dir)
    doc = json.loads((plugin_dir / "manifest.json").read_text(encoding="utf-8"))
    manifest = load_manifest(plugin_dir / "manifest.json")
    entry = doc.get("entry")
    if not entry:
        raise PluginProtocolError(f"{plugin_dir}/manifest.json has no 'entry' argv")
    argv = [
        str(plugin_dir / part) if (plugin_dir / part).exists() else part for part in entry
    ]
    return manifest, SubprocessAgent(argv, cwd=str(plugin_dir))

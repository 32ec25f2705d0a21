"""Recording stubs for browser and computer automation.

Real automation backends attach behind the same Agent interface; these stubs
record the requested action sequence verbatim and return a canned
acknowledgment plus a placeholder screenshot artifact. 1x1 PNG built at
import time so no binary blob lives in the source.
"""

from __future__ import annotations

import re
import struct
import zlib
from dataclasses import dataclass
from pathlib import Path

from ..agentkit import AgentOutput, InvokeContext, TaskPayload


def _png_chunk(tag: bytes, body: bytes) -> bytes:
    return (
        struct.pack(">I", len(body))
        + tag
        + body
        + struct.pack(">I", zlib.crc32(tag + body) & 0xFFFFFFFF)
    )


def placeholder_png() -> bytes:
    """A valid 1x1 grayscale PNG."""
    ihdr = struct.pack(">IIBBBBB", 1, 1, 8, 0, 0, 0, 0)
    idat = zlib.compress(b"\x00\x00")
    return (
        b"\x89PNG\r\n\x1a\n"
        + _png_chunk(b"IHDR", ihdr)
        + _png_chunk(b"IDAT", idat)
        + _png_chunk(b"IEND", b"")
    )


_SPLIT = re.compile(r"\s*(?:\bthen\b|\band\b|;|\n)\s*", re.IGNORECASE)


def parse_actions(request: str) -> list[str]:
    return [a.strip() for a in _SPLIT.split(request) if a.strip()]


@dataclass(frozen=True)
class StubResult:
    actions: tuple[str, ...]
    acknowledgment: str
    screenshot: str | None


class _RecordingStub:
    """Shared behavior; subclasses fix the capability name."""

    capability = "stub"

    def __init__(self):
        self.recorded: list[tuple[str, ...]] = []

    def perform(self, request: str, artifacts_dir: str | None, step_id: str) -> StubResult:
        actions = tuple(parse_actions(request))
        self.recorded.append(actions)
        screenshot = None
        if artifacts_dir is not None:
            shots = Path(artifacts_dir) / "screenshots"
            shots.mkdir(parents=True, exist_ok=True)
            name = f"{self.capability}_{step_id}.png"
            (shots / name).write_bytes(placeholder_png())
            screenshot = f"screenshots/{name}"
        return StubResult(
            actions=actions,
            acknowledgment=f"recorded {len(actions)} {self.capability} action(s)",
            screenshot=screenshot,
        )

    def handle(self, task: TaskPayload, ctx: InvokeContext) -> AgentOutput:
        ctx.heartbeat()
        result = self.perform(task.description, task.artifacts_dir, task.step_id)
        artifacts = (result.screenshot,) if result.screenshot else ()
        return AgentOutput(
            summary=result.acknowledgment,
            artifacts=artifacts,
            data={"actions": list(result.actions)},
        )


class BrowserStubAgent(_RecordingStub):
    capability = "browser"


class ComputerStubAgent(_RecordingStub):
    capability = "computer"

"""Coder agent: writes and executes scripts inside a jailed workspace.

Scripts run as subprocesses of the host interpreter (python-like) or /bin/sh
(shell-like), with the working directory inside the jail, wall clock bounded
by max_runtime, and captured output capped at max_output. Which libraries the
interpreter offers is deployment configuration, not contract.
"""

from __future__ import annotations

import re
import subprocess
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from ..errors import ExecDenied, SandboxTimeout
from ..agentkit import AgentOutput, InvokeContext, PrivilegeGrants, TaskPayload
from ..agentkit.guards import require_exec

LANGUAGES = ("python-like", "shell-like")


@dataclass(frozen=True)
class ExecResult:
    stdout: str
    stderr: str
    exit_code: int
    duration_ms: int


def run_script(
    source: str,
    language: str,
    grants: PrivilegeGrants,
    workdir: str | Path | None = None,
) -> ExecResult:
    """Execute one script within the sandbox grants."""
    require_exec(grants)
    if language not in LANGUAGES:
        raise ExecDenied(f"unsupported language {language!r}")
    root = Path(workdir or grants.fs_jail_root or ".").resolve()
    workspace = root / "workspace"
    workspace.mkdir(parents=True, exist_ok=True)

    suffix = ".py" if language == "python-like" else ".sh"
    script_path = workspace / f"script{suffix}"
    script_path.write_text(source, encoding="utf-8")
    argv = (
        [sys.executable, str(script_path)]
        if language == "python-like"
        else ["/bin/sh", str(script_path)]
    )

    started = time.monotonic()
    try:
        proc = subprocess.run(
            argv,
            cwd=workspace,
            capture_output=True,
            timeout=grants.max_runtime_ms / 1000.0,
            text=True,
        )
    except subprocess.TimeoutExpired:
        raise SandboxTimeout(f"script exceeded {grants.max_runtime_ms} ms") from None
    duration_ms = int((time.monotonic() - started) * 1000)

    cap = grants.max_output_bytes
    return ExecResult(
        stdout=proc.stdout[:cap],
        stderr=proc.stderr[:cap],
        exit_code=proc.returncode,
        duration_ms=duration_ms,
    )


_CODE_BLOCK = re.compile(r"```(?:python|sh|shell)?\s*\n(.*?)```", re.DOTALL)


class CoderAgent:
    def handle(self, task: TaskPayload, ctx: InvokeContext) -> AgentOutput:
        ctx.heartbeat()
        source = task.params.get("source")
        language = task.params.get("language", "python-like")
        if source is None:
            m = _CODE_BLOCK.search(task.description)
            if m:
                source = m.group(1)
            else:
                # echo work: emit the description so scripted plans stay runnable
                source = f"print({task.description!r})"
        try:
            result = run_script(source, language, ctx.grants)
        except (ExecDenied, SandboxTimeout) as err:
            err.failure_cause = (
                "exec_denied" if isinstance(err, ExecDenied) else "timeout"
            )
            raise
        summary = result.stdout.strip() or f"exit {result.exit_code}"
        if result.exit_code != 0:
            err = RuntimeError(f"script failed (exit {result.exit_code}): {result.stderr[:500]}")
            err.failure_cause = "script_error"
            raise err
        return AgentOutput(
            summary=summary,
            data={
                "stdout": result.stdout,
                "stderr": result.stderr,
                "exit_code": result.exit_code,
                "duration_ms": result.duration_ms,
            },
        )

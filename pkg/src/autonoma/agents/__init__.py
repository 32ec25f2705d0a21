"""Reference worker agents proving the plugin contract.

``builtin_manifests`` wires the standard fleet: researcher, coder,
file_manager, reporter, and the browser/computer recording stubs.
"""

from __future__ import annotations

from pathlib import Path

from ..agentkit import AgentManifest, AgentRegistry, PrivilegeGrants
from ..search import SearchTool
from .coder import CoderAgent, ExecResult, run_script
from .filemanager import (
    ApprovalTokenBox,
    FileManagerAgent,
    FileOp,
    FileOpResult,
    execute_fileop,
    parse_fileop,
)
from .jail import jail_relative, resolve_in_jail
from .reporter import Report, ReporterAgent, compile_report, recommendation_for
from .researcher import Findings, ResearcherAgent, research
from .stubs import BrowserStubAgent, ComputerStubAgent, StubResult, parse_actions, placeholder_png

__all__ = [
    "ApprovalTokenBox",
    "BrowserStubAgent",
    "CoderAgent",
    "ComputerStubAgent",
    "ExecResult",
    "FileManagerAgent",
    "FileOp",
    "FileOpResult",
    "Findings",
    "Report",
    "ReporterAgent",
    "ResearcherAgent",
    "StubResult",
    "compile_report",
    "execute_fileop",
    "jail_relative",
    "parse_actions",
    "parse_fileop",
    "placeholder_png",
    "recommendation_for",
    "register_builtin_agents",
    "research",
    "resolve_in_jail",
    "run_script",
]


def register_builtin_agents(
    registry: AgentRegistry,
    jail_root: str | Path,
    search_tools: list[SearchTool] | None = None,
    token_box: ApprovalTokenBox | None = None,
) -> None:
    """Register the standard worker fleet against one jail root."""
    jail_root = str(jail_root)
    token_box = token_box or ApprovalTokenBox()
    registry.register(
        AgentManifest(
            id="researcher",
            display_name="Researcher",
            capabilities=frozenset({"web_search"}),
            grants=PrivilegeGrants(allow_network=True),
            description="Gathers external data and returns sourced findings.",
        ),
        ResearcherAgent(search_tools or []),
    )
    registry.register(
        AgentManifest(
            id="coder",
            display_name="Coder",
            capabilities=frozenset({"code_exec"}),
            grants=PrivilegeGrants(fs_jail_root=jail_root, allow_exec=True),
            description="Writes and executes scripts in a jailed workspace.",
        ),
        CoderAgent(),
    )
    registry.register(
        AgentManifest(
            id="file_manager",
            display_name="File manager",
            capabilities=frozenset({"file_ops"}),
            grants=PrivilegeGrants(fs_jail_root=jail_root),
            description="Jailed file operations with destructive-action gating.",
        ),
        FileManagerAgent(token_box),
    )
    registry.register(
        AgentManifest(
            id="reporter",
            display_name="Reporter",
            capabilities=frozenset({"report"}),
            grants=PrivilegeGrants(),
            description="Summarizes upstream step outputs.",
        ),
        ReporterAgent(),
    )
    registry.register(
        AgentManifest(
            id="browser",
            display_name="Browser (stub)",
            capabilities=frozenset({"browser"}),
            grants=PrivilegeGrants(),
            description="Records browser action sequences; real backend attaches here.",
        ),
        BrowserStubAgent(),
    )
    registry.register(
        AgentManifest(
            id="computer",
            display_name="Computer (stub)",
            capabilities=frozenset({"computer"}),
            grants=PrivilegeGrants(),
            description="Records desktop action sequences; real backend attaches here.",
        ),
        ComputerStubAgent(),
    )

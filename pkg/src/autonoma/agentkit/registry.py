"""Runtime agent registry: concurrent reads, serialized mutations.

Registration is additive and takes effect immediately (a workflow planned
against vocabulary V always executes against a registry containing at least
V's agents). Removal is deferred to the next workflow boundary so a running
dispatch never dangles.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

from ..errors import DuplicateAgentId
from .manifest import AgentManifest, lint_grants


@dataclass
class RegisteredAgent:
    manifest: AgentManifest
    implementation: object  # Agent or a simulation behavior (see supervisor)


class AgentRegistry:
    def __init__(self):
        self._lock = threading.RLock()
        self._agents: dict[str, RegisteredAgent] = {}
        self._pending_removals: set[str] = set()
        self._active_workflows = 0

    def register(self, manifest: AgentManifest, implementation: object) -> str:
        """Lint grants, then make the agent immediately selectable."""
        lint_grants(manifest)
        with self._lock:
            if manifest.id in self._agents:
                raise DuplicateAgentId(f"agent id {manifest.id!r} already registered")
            self._agents[manifest.id] = RegisteredAgent(manifest, implementation)
            self._pending_removals.discard(manifest.id)
        return manifest.id

    def remove(self, agent_id: str) -> None:
        """Deferred while any workflow is active; immediate otherwise."""
        with self._lock:
            if agent_id not in self._agents:
                return
            if self._active_workflows > 0:
                self._pending_removals.add(agent_id)
            else:
                del self._agents[agent_id]

    def begin_workflow(self) -> None:
        with self._lock:
            self._active_workflows += 1

    def end_workflow(self) -> None:
        with self._lock:
            self._active_workflows = max(0, self._active_workflows - 1)
            if self._active_workflows == 0:
                for agent_id in self._pending_removals:
                    self._agents.pop(agent_id, None)
                self._pending_removals.clear()

    def get(self, agent_id: str) -> RegisteredAgent:
        with self._lock:
            return self._agents[agent_id]

    def __contains__(self, agent_id: str) -> bool:
        with self._lock:
            return agent_id in self._agents

    def ids(self) -> list[str]:
        with self._lock:
            return sorted(self._agents)

    def capabilities(self) -> frozenset:
        """The live capability vocabulary the planner sees."""
        with self._lock:
            out: set[str] = set()
            for entry in self._agents.values():
                out |= entry.manifest.capabilities
            return frozenset(out)

    def agents_with(self, capability: str) -> list[str]:
        with self._lock:
            return sorted(
                a.manifest.id
                for a in self._agents.values()
                if capability in a.manifest.capabilities
            )

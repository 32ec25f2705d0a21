"""Hook/interceptor pipeline for domain-specific logic at workflow stages.

Hooks at one stage run in registration order. A transform hook returns a
replacement payload; a validate hook raises HookAbort to abort the stage
(recorded as a failure there, never an unhandled crash); a notify hook's
return value and exceptions are ignored.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable


class HookStage(str, Enum):
    PRE_PLAN = "pre_plan"
    POST_PLAN = "post_plan"
    PRE_TASK = "pre_task"
    POST_TASK = "post_task"
    PRE_REPORT = "pre_report"
    POST_REPORT = "post_report"


class HookAction(str, Enum):
    TRANSFORM = "transform"
    VALIDATE = "validate"
    NOTIFY = "notify"


class HookAbort(Exception):
    def __init__(self, hook_id: str, reason: str):
        super().__init__(f"hook {hook_id}: {reason}")
        self.hook_id = hook_id
        self.reason = reason


@dataclass(frozen=True)
class Hook:
    stage: HookStage
    id: str
    action: HookAction
    fn: Callable[[Any, dict], Any]


class HookBoard:
    def __init__(self):
        self._lock = threading.Lock()
        self._hooks: dict[HookStage, list[Hook]] = {stage: [] for stage in HookStage}

    def install(self, hook: Hook) -> str:
        with self._lock:
            self._hooks[hook.stage].append(hook)
        return hook.id

    def run(self, stage: HookStage, payload: Any, context: dict | None = None) -> Any:
        """Pipe payload through the stage's hooks; HookAbort propagates."""
        context = context or {}
        with self._lock:
            hooks = list(self._hooks[stage])
        for hook in hooks:
            if hook.action is HookAction.TRANSFORM:
                payload = hook.fn(payload, context)
            elif hook.action is HookAction.VALIDATE:
                try:
                    hook.fn(payload, context)
                except HookAbort:
                    raise
                except Exception as err:
                    raise HookAbort(hook.id, str(err)) from err
            else:  # notify: side effects only
                try:
                    hook.fn(payload, context)
                except Exception:
                    pass
        return payload

"""Injectable clocks.

The engine and pipeline accept any Clock; tests and the benchmark inject a
LogicalClock so runs take no wall time and timestamps are reproducible.
"""

from __future__ import annotations

import time
from typing import Protocol


class Clock(Protocol):
    def now_ms(self) -> int: ...


class WallClock:
    def now_ms(self) -> int:
        return time.time_ns() // 1_000_000


class LogicalClock:
    """Monotonic counter in logical milliseconds, advanced by the scheduler."""

    def __init__(self, start_ms: int = 0):
        self._now = start_ms

    def now_ms(self) -> int:
        return self._now

    def advance_to(self, t_ms: int) -> None:
        if t_ms > self._now:
            self._now = t_ms

    def advance(self, dt_ms: int) -> None:
        self._now += dt_ms

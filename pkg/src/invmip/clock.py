"""Time sources for solve limits and recorded durations.

All time-dependent behavior (early stopping, time limits, logged seconds)
reads one clock object.  :class:`WallClock` gives real durations.
:class:`TickClock` advances only when solvers report work (simplex pivots,
tree nodes), which makes every recorded duration, and therefore every log
and CSV, byte-identical between runs of the same seeded command.
"""

from __future__ import annotations

import time


class WallClock:
    """Monotonic wall-clock time; ``tick`` is a no-op."""

    def now(self) -> float:
        return time.perf_counter()

    def tick(self, units: int = 1) -> None:
        pass


class TickClock:
    """Deterministic clock: each unit of solver work advances a fixed amount."""

    def __init__(self, seconds_per_tick: float = 1e-6):
        self.seconds_per_tick = seconds_per_tick
        self._elapsed = 0.0

    def now(self) -> float:
        return self._elapsed

    def tick(self, units: int = 1) -> None:
        self._elapsed += units * self.seconds_per_tick

"""Clock and timer scheduling, in simulated or real time.

Game engines never touch timers directly; the server schedules callbacks
through one of these schedulers.  The simulated scheduler totally orders
all callbacks, which makes bot scenarios deterministic and lets them run
in milliseconds.
"""

from __future__ import annotations

import heapq
import itertools
import time
from typing import Callable, Optional


class TimerHandle:
    __slots__ = ("_cancel",)

    def __init__(self, cancel: Callable[[], None]):
        self._cancel = cancel

    def cancel(self) -> None:
        self._cancel()


class SimScheduler:
    """Deterministic discrete-event scheduler with a simulated clock."""

    def __init__(self, start: float = 0.0):
        self._now = start
        self._heap = []
        self._counter = itertools.count()

    def now(self) -> float:
        return self._now

    def schedule(self, delay: float, fn: Callable[[], None]) -> TimerHandle:
        entry = [self._now + max(0.0, delay), next(self._counter), fn]
        heapq.heappush(self._heap, entry)

        def cancel():
            entry[2] = None

        return TimerHandle(cancel)

    def run(self, until: Optional[float] = None) -> float:
        """Run due callbacks in time order; returns the final simulated time."""
        while self._heap:
            when, _, fn = self._heap[0]
            if until is not None and when > until:
                self._now = until
                return self._now
            heapq.heappop(self._heap)
            if fn is None:
                continue
            self._now = when
            fn()
        return self._now


class AsyncioScheduler:
    """Wall-clock scheduler backed by an asyncio event loop."""

    def __init__(self, loop):
        self._loop = loop

    def now(self) -> float:
        return time.time()

    def schedule(self, delay: float, fn: Callable[[], None]) -> TimerHandle:
        handle = self._loop.call_later(delay, fn)
        return TimerHandle(handle.cancel)

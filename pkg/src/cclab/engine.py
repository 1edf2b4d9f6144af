"""Discrete-event engine on an integer microsecond clock.

All simulation time is kept in whole microseconds so that replaying a
run yields bit-identical event ordering on any platform.  Events that
share a fire time are dispatched in insertion order.
"""

from __future__ import annotations

import heapq
from typing import Callable

SimTime = int  # microseconds

US_PER_MS = 1_000
US_PER_S = 1_000_000


def ms(value: float) -> SimTime:
    """Convert milliseconds to a SimTime, rounding to the nearest microsecond."""
    return round(value * US_PER_MS)


def seconds(value: float) -> SimTime:
    return round(value * US_PER_S)


def to_seconds(t: SimTime) -> float:
    return t / US_PER_S


class ScheduleInPastError(ValueError):
    """Raised when an event is scheduled before the current clock."""


class EventHandle:
    """Returned by schedule(); cancel() prevents a pending event from firing."""

    __slots__ = ("fire_at", "seq", "action", "cancelled")

    def __init__(self, fire_at: SimTime, seq: int, action: Callable[[], None]):
        self.fire_at = fire_at
        self.seq = seq
        self.action = action
        self.cancelled = False

    def cancel(self) -> None:
        self.cancelled = True

    def __lt__(self, other: "EventHandle") -> bool:
        # seq is unique, so ordering is total and deterministic
        if self.fire_at != other.fire_at:
            return self.fire_at < other.fire_at
        return self.seq < other.seq


class EventLoop:
    """Priority-queue scheduler with a virtual clock.

    The clock only moves forward.  Scheduling in the past is a hard
    error rather than a silent reorder.  Cancelled events are skipped
    and do not count as processed.
    """

    def __init__(self) -> None:
        self.now: SimTime = 0
        self._heap: list[EventHandle] = []
        self._seq = 0
        self.processed = 0
        # (fire_at, seq) of every dispatched event, for replay checks
        self.trace: list[tuple[SimTime, int]] = []

    def schedule(self, fire_at: SimTime, action: Callable[[], None]) -> EventHandle:
        if fire_at < self.now:
            raise ScheduleInPastError(
                f"cannot schedule at {fire_at} us; clock is at {self.now} us"
            )
        handle = EventHandle(fire_at, self._seq, action)
        self._seq += 1
        heapq.heappush(self._heap, handle)
        return handle

    def schedule_in(self, delay: SimTime, action: Callable[[], None]) -> EventHandle:
        return self.schedule(self.now + delay, action)

    def run_until(self, t_end: SimTime) -> int:
        """Dispatch every pending event with fire_at <= t_end, in order.

        Returns the number of events processed.  On return the clock
        sits at t_end even if the queue drained early.
        """
        heap = self._heap
        dispatched = 0
        while heap and heap[0].fire_at <= t_end:
            handle = heapq.heappop(heap)
            if handle.cancelled:
                continue
            self.now = handle.fire_at
            self.trace.append((handle.fire_at, handle.seq))
            handle.action()
            dispatched += 1
        self.now = t_end
        self.processed += dispatched
        return dispatched

    def pending(self) -> int:
        return sum(1 for h in self._heap if not h.cancelled)

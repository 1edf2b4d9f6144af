"""Event loop ordering, cancellation, and replay determinism."""

import hashlib

import pytest

from cclab.engine import EventLoop, ScheduleInPastError, ms, seconds


def test_schedule_at_current_time_fires_first():
    loop = EventLoop()
    order = []
    loop.schedule(0, lambda: order.append("now"))
    loop.schedule(5, lambda: order.append("later"))
    loop.run_until(10)
    assert order == ["now", "later"]


def test_equal_fire_times_dispatch_in_insertion_order():
    loop = EventLoop()
    order = []
    loop.schedule(ms(1), lambda: order.append("first"))
    loop.schedule(ms(1), lambda: order.append("second"))
    loop.schedule(ms(1), lambda: order.append("third"))
    loop.run_until(ms(1))
    assert order == ["first", "second", "third"]


def test_scheduling_in_the_past_raises():
    loop = EventLoop()
    loop.run_until(10)
    with pytest.raises(ScheduleInPastError):
        loop.schedule(5, lambda: None)


def test_run_until_empty_queue_advances_clock():
    loop = EventLoop()
    assert loop.run_until(seconds(180)) == 0
    assert loop.now == seconds(180)


def test_run_until_boundary_is_inclusive():
    loop = EventLoop()
    hits = []
    loop.schedule(ms(1), lambda: hits.append(1))
    loop.schedule(ms(1), lambda: hits.append(2))
    loop.schedule(ms(2), lambda: hits.append(3))
    assert loop.run_until(ms(1)) == 2
    assert hits == [1, 2]
    assert loop.run_until(ms(2)) == 1


def test_cancelled_event_never_fires_nor_counts():
    loop = EventLoop()
    hits = []
    keep = loop.schedule(5, lambda: hits.append("keep"))
    drop = loop.schedule(5, lambda: hits.append("drop"))
    drop.cancel()
    assert loop.run_until(10) == 1
    assert hits == ["keep"]
    assert keep.fire_at == 5


def test_pending_excludes_cancelled():
    loop = EventLoop()
    loop.schedule(5, lambda: None)
    handle = loop.schedule(6, lambda: None)
    handle.cancel()
    assert loop.pending() == 1


def test_handler_reentrancy_keeps_clock_monotone():
    loop = EventLoop()
    seen = []

    def chain():
        seen.append(loop.now)
        if len(seen) < 5:
            loop.schedule_in(7, chain)

    loop.schedule(0, chain)
    loop.run_until(seconds(1))
    assert seen == sorted(seen)
    assert seen == [0, 7, 14, 21, 28]


def test_replay_produces_identical_trace():
    def build_and_run():
        loop = EventLoop()

        def spawn(depth):
            if depth < 40:
                loop.schedule_in(3, lambda: spawn(depth + 1))
                loop.schedule_in(5, lambda: None)

        loop.schedule(0, lambda: spawn(0))
        loop.run_until(seconds(1))
        return hashlib.sha256(repr(loop.trace).encode()).hexdigest()

    assert build_and_run() == build_and_run()


def test_ms_and_seconds_round_to_microseconds():
    assert ms(1) == 1_000
    assert ms(0.1) == 100
    assert seconds(180) == 180_000_000
    assert seconds(0.25) == 250_000

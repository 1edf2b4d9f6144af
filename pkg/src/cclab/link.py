"""Bottleneck link: droptail queue, fixed-rate serializer, link-layer ARQ.

The radio link is abstracted as a single FIFO server.  Frame errors do
not surface as loss; the ARQ process retransmits the frame, holding the
server for an extra delay per attempt.  A deep ARQ stall therefore
blocks the head of the line: nothing behind it drains, arrivals keep
landing, and a full buffer overflows in a burst.  Only queue overflow
drops packets, unless a residual loss probability is configured for
packets that exhaust their retransmission budget.

ACKs ride a separate delay-only reverse channel and never queue.
"""

from __future__ import annotations

import random
from bisect import bisect_right
from dataclasses import dataclass
from typing import Callable

from .engine import EventLoop, SimTime, US_PER_S


@dataclass
class LinkConfig:
    rate_bps: int = 1_500_000
    prop_rtt_us: SimTime = 100_000
    queue_capacity: int = 60       # packets
    # rare deep stalls: ~one frame in two thousand costs 40 ms of air time
    arq_frame_error_prob: float = 0.0005
    arq_retx_delay_us: SimTime = 40_000
    arq_max_retx: int = 6
    residual_loss_prob: float = 0.0

    def validate(self) -> None:
        if self.rate_bps <= 0:
            raise ValueError("link rate must be positive")
        if self.prop_rtt_us < 0:
            raise ValueError("propagation RTT cannot be negative")
        if self.queue_capacity < 1:
            raise ValueError("queue capacity must be at least 1 packet")
        if not 0.0 <= self.arq_frame_error_prob <= 1.0:
            raise ValueError("frame error probability must be in [0, 1]")
        if not 0.0 <= self.residual_loss_prob <= 1.0:
            raise ValueError("residual loss probability must be in [0, 1]")
        if self.arq_max_retx < 0:
            raise ValueError("arq_max_retx cannot be negative")
        if self.arq_retx_delay_us < 0:
            raise ValueError("arq_retx_delay_us cannot be negative")


class Packet:
    __slots__ = ("flow_id", "seq", "payload_len", "wire_len", "is_retx", "sent_at")

    def __init__(self, flow_id: int, seq: int, payload_len: int, wire_len: int,
                 is_retx: bool, sent_at: SimTime):
        self.flow_id = flow_id
        self.seq = seq
        self.payload_len = payload_len
        self.wire_len = wire_len
        self.is_retx = is_retx
        self.sent_at = sent_at


def arq_error_count(rng: random.Random, error_prob: float, max_retx: int) -> int:
    """Consecutive frame errors for one packet: geometric, capped at max_retx."""
    k = 0
    while k < max_retx and rng.random() < error_prob:
        k += 1
    return k


def arq_penalty(rng: random.Random, error_prob: float, retx_delay_us: SimTime,
                max_retx: int) -> SimTime:
    """Delay added by link-layer retransmissions of one packet.

    Charges retx_delay_us per errored attempt.  The uncapped mean is
    retx_delay_us * p / (1 - p).
    """
    return arq_error_count(rng, error_prob, max_retx) * retx_delay_us


class BottleneckLink:
    """Shared downlink: one serializer, one droptail queue, in-order delivery.

    Packets from all flows compete for the same queue.  The server holds
    each packet for its serialization time plus any ARQ penalty, then the
    packet travels one propagation half-RTT to its flow's sink.  Service
    is strictly one at a time, so delivery order equals acceptance order.
    """

    def __init__(self, loop: EventLoop, config: LinkConfig, rng: random.Random):
        config.validate()
        self.loop = loop
        self.config = config
        self.rng = rng
        self._queue: list[Packet] = []
        self._busy = False
        self._sinks: dict[int, Callable[[Packet], None]] = {}
        # counters
        self.offered = 0
        self.dropped_tail = 0
        self.dropped_arq = 0
        self.delivered = 0
        self.per_flow_drops: dict[int, int] = {}
        # backlog history as parallel arrays (time, queue length)
        self._backlog_t: list[SimTime] = [0]
        self._backlog_n: list[int] = [0]

    def register_sink(self, flow_id: int, sink: Callable[[Packet], None]) -> None:
        self._sinks[flow_id] = sink
        self.per_flow_drops.setdefault(flow_id, 0)

    def serialization_us(self, wire_len: int) -> SimTime:
        return wire_len * 8 * US_PER_S // self.config.rate_bps

    @property
    def one_way_us(self) -> SimTime:
        return self.config.prop_rtt_us // 2

    def offer(self, packet: Packet) -> bool:
        """Hand a packet to the link.  Returns False on droptail drop."""
        self.offered += 1
        if self._busy:
            if len(self._queue) >= self.config.queue_capacity:
                self.dropped_tail += 1
                self.per_flow_drops[packet.flow_id] = (
                    self.per_flow_drops.get(packet.flow_id, 0) + 1)
                return False
            self._queue.append(packet)
            self._record_backlog()
        else:
            self._start_service(packet)
        return True

    def send_reverse(self, action: Callable[[], None]) -> None:
        """Carry an ACK back to a sender: pure delay, no queueing."""
        self.loop.schedule_in(self.one_way_us, action)

    def backlog_at(self, t: SimTime) -> int:
        """Queue occupancy at virtual time t, from the recorded history."""
        i = bisect_right(self._backlog_t, t) - 1
        return self._backlog_n[i] if i >= 0 else 0

    def quiescent_accounting_ok(self) -> bool:
        """Conservation check, valid once the queue and pipe are empty."""
        accepted = self.offered - self.dropped_tail
        return accepted == self.delivered + self.dropped_arq + len(self._queue) + (
            1 if self._busy else 0
        )

    # internal

    def _record_backlog(self) -> None:
        now = self.loop.now
        if self._backlog_t[-1] == now:
            self._backlog_n[-1] = len(self._queue)
        else:
            self._backlog_t.append(now)
            self._backlog_n.append(len(self._queue))

    def _start_service(self, packet: Packet) -> None:
        cfg = self.config
        self._busy = True
        ser = self.serialization_us(packet.wire_len)
        errors = arq_error_count(self.rng, cfg.arq_frame_error_prob, cfg.arq_max_retx)
        hold = ser + errors * cfg.arq_retx_delay_us
        lost = False
        if cfg.residual_loss_prob > 0.0 and cfg.arq_max_retx > 0 and errors == cfg.arq_max_retx:
            # retransmission budget exhausted; the frame may be abandoned
            lost = self.rng.random() < cfg.residual_loss_prob
        now = self.loop.now
        self.loop.schedule(now + hold, self._service_done)
        if lost:
            self.dropped_arq += 1
            self.per_flow_drops[packet.flow_id] = (
                self.per_flow_drops.get(packet.flow_id, 0) + 1)
            return
        self.loop.schedule(now + hold + self.one_way_us,
                           lambda p=packet: self._deliver(p))

    def _service_done(self) -> None:
        self._busy = False
        if self._queue:
            nxt = self._queue.pop(0)
            self._record_backlog()
            self._start_service(nxt)

    def _deliver(self, packet: Packet) -> None:
        self.delivered += 1
        self._sinks[packet.flow_id](packet)

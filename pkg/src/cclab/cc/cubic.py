"""Cubic window growth: concave toward the last maximum, then convex.

The window follows w(t) = C * (t - K)^3 + w_max in real time since the
last reduction, with K chosen so the curve starts from the post-loss
window and crosses w_max with zero slope at t = K.  An optional AIMD
shadow window keeps growth at least as fast as a plain TCP flow would
manage (the TCP-friendly region).
"""

from __future__ import annotations

from .base import Controller
from .params import SCALE, CubicParams


class Cubic(Controller):
    name = "cubic"

    def __init__(self, initial_cwnd: int, initial_ssthresh: float,
                 params: CubicParams | None = None):
        super().__init__(initial_cwnd, initial_ssthresh)
        self.params = params or CubicParams()
        self._cwnd = float(initial_cwnd)   # authoritative window, segments
        self._ssthresh = float(initial_ssthresh)
        self.epoch_valid = False
        self.max_win = 0.0
        self.k_seconds = 0.0
        self.epoch_start_us = 0
        self._w_est = 0.0
        # (now_us, epoch_start_us, max_win, k_seconds, cwnd) per growth ACK,
        # kept so the trajectory can be replayed against the closed form
        self.curve_samples: list[tuple[int, int, float, float, float]] = []

    # float window overrides the fixed-point representation

    def cwnd_segments(self) -> float:
        return self._cwnd

    def cwnd_floor(self) -> int:
        return int(self._cwnd)

    def ssthresh_segments(self) -> float:
        return self._ssthresh

    def in_slow_start(self) -> bool:
        return self._cwnd < self._ssthresh

    def window_at(self, elapsed_seconds: float) -> float:
        """Closed-form window this many seconds after the last reduction."""
        p = self.params
        return p.c * (elapsed_seconds - self.k_seconds) ** 3 + self.max_win

    def on_ack_growth(self, now_us: int) -> None:
        if self.in_slow_start():
            self._cwnd += 1.0
            return
        if not self.epoch_valid:
            self._cwnd += 1.0 / self._cwnd  # plain AIMD until the first loss
            return
        elapsed = (now_us - self.epoch_start_us) / 1_000_000
        target = self.window_at(elapsed)
        if target < 1.0:
            target = 1.0
        if self.params.tcp_friendly:
            b = self.params.b
            self._w_est += (3.0 * b / (2.0 - b)) / self._cwnd
            if self._w_est > target:
                target = self._w_est
        if target > self._cwnd:
            self._cwnd = target
        self.curve_samples.append(
            (now_us, self.epoch_start_us, self.max_win, self.k_seconds, self._cwnd))

    def _start_epoch(self, now_us: int, pre_loss: float) -> None:
        p = self.params
        self.max_win = pre_loss
        self.k_seconds = (self.max_win * p.b / p.c) ** (1.0 / 3.0)
        self.epoch_start_us = now_us
        self.epoch_valid = True

    def on_3dupack(self, now_us: int) -> None:
        p = self.params
        pre = self._cwnd
        if p.fast_convergence and self.epoch_valid and pre < self.max_win:
            # losing ground to a competitor: aim the new curve below the
            # old ceiling so the plateau releases share
            self._start_epoch(now_us, pre * (2.0 - p.b) / 2.0)
        else:
            self._start_epoch(now_us, pre)
        post = max(1.0, (1.0 - p.b) * pre)
        self._cwnd = post
        self._ssthresh = post
        self._w_est = post

    def on_timeout(self, now_us: int) -> None:
        # an RTO discards the epoch: its curve aims at a stale maximum, and
        # the convex tail beyond it would slam the link.  Grow AIMD-style
        # until the next fast retransmit anchors a fresh curve.
        pre = self._cwnd
        post = max(1.0, (1.0 - self.params.b) * pre)
        self.epoch_valid = False
        self.max_win = 0.0
        self.k_seconds = 0.0
        self._ssthresh = post
        self._w_est = post
        self._cwnd = 1.0

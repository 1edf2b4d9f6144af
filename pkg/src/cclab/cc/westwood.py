"""Westwood+: set the window from estimated bandwidth times minimum RTT.

The sender counts returning ACKs (duplicates stand in for one delivered
segment) and closes a sample interval no shorter than max(RTT_min,
50 ms).  Each sample feeds a low-pass filter; empty intervals decay the
estimate.  On congestion the window collapses to BWE * RTT_min, which
is just enough to keep the pipe full with the bottleneck queue empty.
"""

from __future__ import annotations

import logging

from .base import Controller
from .params import SCALE, WestwoodParams, fp_from_segments

log = logging.getLogger(__name__)


class WestwoodPlus(Controller):
    name = "westwood+"

    def __init__(self, initial_cwnd: int, initial_ssthresh: float, mss: int,
                 params: WestwoodParams | None = None):
        super().__init__(initial_cwnd, initial_ssthresh)
        self.params = params or WestwoodParams()
        self.mss = mss
        self.bwe_bytes_per_s: float | None = None
        self.rtt_min_us: int | None = None
        self._interval_start_us: int | None = None
        self._acked_in_interval = 0
        self.fallback_decreases = 0   # losses seen before any bandwidth sample
        self.decrease_violations = 0  # BWE * RTT_min above the pre-loss window

    # bandwidth estimation

    def _interval_us(self) -> int:
        if self.rtt_min_us is None:
            return self.params.min_interval_us
        return max(self.rtt_min_us, self.params.min_interval_us)

    def _push_sample(self, sample: float) -> None:
        gain = self.params.filter_gain
        if self.bwe_bytes_per_s is None:
            self.bwe_bytes_per_s = sample
        else:
            self.bwe_bytes_per_s = gain * self.bwe_bytes_per_s + (1.0 - gain) * sample

    def on_ack_observed(self, now_us: int, acked_bytes: int, is_dupack: bool) -> None:
        if self._interval_start_us is None:
            self._interval_start_us = now_us
        interval = self._interval_us()
        # close every elapsed interval first; gaps contribute zero samples
        while now_us - self._interval_start_us >= interval:
            sample = self._acked_in_interval * 1_000_000 / interval
            self._push_sample(sample)
            self._acked_in_interval = 0
            self._interval_start_us += interval
            interval = self._interval_us()
        if is_dupack:
            # a duplicate ACK still means one segment left the network
            self._acked_in_interval += self.mss
        else:
            self._acked_in_interval += acked_bytes

    def on_rtt_sample(self, now_us: int, rtt_us: int) -> None:
        if self.rtt_min_us is None or rtt_us < self.rtt_min_us:
            self.rtt_min_us = rtt_us

    # decreases

    def _target_fp(self) -> int | None:
        if self.bwe_bytes_per_s is None or self.rtt_min_us is None:
            return None
        segments = self.bwe_bytes_per_s * (self.rtt_min_us / 1_000_000) / self.mss
        return max(SCALE, fp_from_segments(segments))

    def on_3dupack(self, now_us: int) -> None:
        target = self._target_fp()
        if target is None:
            self.fallback_decreases += 1
            log.debug("westwood+ decrease before first BWE sample, halving instead")
            p = self.params
            target = max(SCALE, self.cwnd_fp * p.fallback_beta_num // p.fallback_beta_den)
        elif target > self.cwnd_fp:
            self.decrease_violations += 1
        self.cwnd_fp = target
        self.ssthresh_fp = target

    def on_timeout(self, now_us: int) -> None:
        target = self._target_fp()
        if target is None:
            self.fallback_decreases += 1
            p = self.params
            target = max(SCALE, self.cwnd_fp * p.fallback_beta_num // p.fallback_beta_den)
        self.ssthresh_fp = target
        self.cwnd_fp = SCALE

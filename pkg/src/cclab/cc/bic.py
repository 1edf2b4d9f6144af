"""Binary increase congestion control.

After a loss the window binary-searches between the reduced window and
the pre-loss maximum: jump to the midpoint when it is near, move by
S_max when it is far, and declare convergence once the step would fall
under S_min.  Past the old maximum the search turns around (max
probing): first a small step, then doubling, then linear at S_max.
Below a low-window threshold the variant degrades to plain AIMD.
"""

from __future__ import annotations

from .base import Controller
from .params import SCALE, BicParams, fp_from_segments


class Bic(Controller):
    name = "bic"

    def __init__(self, initial_cwnd: int, initial_ssthresh: float,
                 params: BicParams | None = None):
        super().__init__(initial_cwnd, initial_ssthresh)
        self.params = params or BicParams()
        p = self.params
        self._s_max_fp = fp_from_segments(p.s_max)
        self._s_min_fp = fp_from_segments(p.s_min)
        self._low_window_fp = fp_from_segments(p.low_window)
        self._probe_start_fp = fp_from_segments(p.probe_start)
        self.epoch_valid = False
        self.cwnd_max_fp = 0
        self.cwnd_min_fp = 0
        self.max_probing = False
        self._probe_gap_fp = self._probe_start_fp
        self._round_left = 0
        self._round_target_fp = 0
        self._per_ack_fp = 0

    # growth

    def _avoidance_growth(self, now_us: int) -> None:
        if not self.epoch_valid or self.cwnd_fp < self._low_window_fp:
            self.cwnd_fp += SCALE * SCALE // self.cwnd_fp
            return
        if self._round_left == 0:
            self._begin_round()
        self.cwnd_fp += self._per_ack_fp
        self._round_left -= 1
        if self._round_left == 0:
            self._finish_round()

    def _begin_round(self) -> None:
        if not self.max_probing:
            midpoint = (self.cwnd_min_fp + self.cwnd_max_fp) // 2
            if midpoint - self.cwnd_fp <= self._s_min_fp:
                # binary search has converged; turn the search around
                self.cwnd_fp = self.cwnd_max_fp
                self.max_probing = True
                self._probe_gap_fp = self._probe_start_fp
            elif midpoint - self.cwnd_fp <= self._s_max_fp:
                self._round_target_fp = midpoint
            else:
                self._round_target_fp = self.cwnd_fp + self._s_max_fp
        if self.max_probing:
            self._round_target_fp = min(self.cwnd_max_fp + self._probe_gap_fp,
                                        self.cwnd_fp + self._s_max_fp)
        self._round_left = max(1, self.cwnd_fp // SCALE)
        step = self._round_target_fp - self.cwnd_fp
        self._per_ack_fp = step // self._round_left if step > 0 else 0

    def _finish_round(self) -> None:
        if self._round_target_fp > self.cwnd_fp:
            self.cwnd_fp = self._round_target_fp  # absorb integer-division residue
        if self.max_probing:
            self._probe_gap_fp *= 2
        self.cwnd_min_fp = self.cwnd_fp  # the reached window becomes the new minimum

    def _reset_round(self) -> None:
        self._round_left = 0
        self._round_target_fp = 0
        self._per_ack_fp = 0

    # decreases

    def _reduce(self, pre_fp: int) -> int:
        p = self.params
        if pre_fp < self._low_window_fp:
            return max(SCALE, pre_fp // 2)
        return max(SCALE, pre_fp * p.beta_num // p.beta_den)

    def on_3dupack(self, now_us: int) -> None:
        p = self.params
        pre = self.cwnd_fp
        post = self._reduce(pre)
        if p.fast_convergence and self.epoch_valid and pre < self.cwnd_max_fp:
            # losing ground to a competitor: remember a deflated maximum
            # so the search tops out early and releases share
            self.cwnd_max_fp = pre * (p.beta_num + p.beta_den) // (2 * p.beta_den)
        else:
            self.cwnd_max_fp = pre   # when probing, the reached window is the new max
        self.cwnd_min_fp = post
        self.cwnd_fp = post
        self.ssthresh_fp = post
        self.max_probing = False
        self.epoch_valid = True
        self._reset_round()

    def on_timeout(self, now_us: int) -> None:
        # an RTO invalidates the search interval: the capacity estimate the
        # epoch encoded predates the stall, so probe afresh like NewReno
        # until the next fast retransmit seeds a new (min, max) pair
        post = self._reduce(self.cwnd_fp)
        self.cwnd_max_fp = 0
        self.cwnd_min_fp = 0
        self.ssthresh_fp = post
        self.cwnd_fp = SCALE
        self.max_probing = False
        self.epoch_valid = False
        self._reset_round()

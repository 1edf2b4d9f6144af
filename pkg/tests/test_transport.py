"""Sender state machine: RTO estimation, recovery, rewind, accounting."""

import random

import pytest

from cclab.cc import make_controller
from cclab.engine import EventLoop, ms, seconds
from cclab.link import BottleneckLink, LinkConfig
from cclab.transport import (ProtocolError, RtoEstimator, TcpReceiver, TcpSender,
                             TransportConfig)

MSS = 1460


class RecordingLink:
    """Link stub that records offers and checks the window discipline."""

    def __init__(self):
        self.sent = []           # (time, seq, is_retx)
        self.sender = None

    def offer(self, packet):
        if self.sender is not None and not packet.is_retx:
            # new data must respect the usable window; resends of data
            # already charged to the flight are exempt
            s = self.sender
            assert s.outstanding_bytes() <= s.effective_window_segments() * MSS
        self.sent.append((packet.sent_at, packet.seq, packet.is_retx))
        return True

    def fresh_seqs(self):
        return [seq for _, seq, retx in self.sent if not retx]

    def retx_seqs(self):
        return [seq for _, seq, retx in self.sent if retx]


def make_sender(variant="newreno", cwnd0=2, ssthresh0=44.0, total_bytes=None,
                **cfg_overrides):
    loop = EventLoop()
    link = RecordingLink()
    config = TransportConfig(initial_cwnd_segments=cwnd0,
                             initial_ssthresh_segments=ssthresh0,
                             **cfg_overrides)
    ctrl = make_controller(variant, cwnd0, ssthresh0, config.mss)
    sender = TcpSender(loop, 0, config, ctrl, link, total_bytes=total_bytes)
    link.sender = sender
    return loop, link, sender


# --- RTO estimator ---------------------------------------------------------


def test_rto_first_sample_100ms():
    est = RtoEstimator(200_000, 60_000_000)
    est.update(ms(100))
    assert est.srtt_us == 100_000
    assert est.rttvar_us == 50_000
    assert est.rto_us() == 300_000


def test_rto_converges_to_constant_sample():
    est = RtoEstimator(200_000, 60_000_000)
    for _ in range(200):
        est.update(1_000_000)
    assert est.rto_us() == 1_000_000


def test_rto_clamped_below_at_minimum():
    est = RtoEstimator(200_000, 60_000_000)
    for _ in range(50):
        est.update(ms(10))
    assert est.rto_us() == 200_000


def test_rto_clamped_above_at_maximum():
    est = RtoEstimator(200_000, 2_000_000)
    est.update(seconds(10))
    assert est.rto_us() == 2_000_000


# --- receiver --------------------------------------------------------------


def test_receiver_in_order_advance():
    rcv = TcpReceiver()
    assert rcv.on_segment(0, MSS) == MSS
    assert rcv.on_segment(MSS, MSS) == 2 * MSS


def test_receiver_buffers_out_of_order_then_merges():
    rcv = TcpReceiver()
    assert rcv.on_segment(MSS, MSS) == 0
    assert rcv.on_segment(3 * MSS, MSS) == 0
    # filling the first hole jumps over the buffered run
    assert rcv.on_segment(0, MSS) == 2 * MSS
    assert rcv.on_segment(2 * MSS, MSS) == 4 * MSS


def test_receiver_counts_duplicates():
    rcv = TcpReceiver()
    rcv.on_segment(0, MSS)
    assert rcv.on_segment(0, MSS) == MSS
    assert rcv.duplicate_segments == 1


def test_receiver_merges_adjacent_runs():
    rcv = TcpReceiver()
    rcv.on_segment(2 * MSS, MSS)
    rcv.on_segment(MSS, MSS)
    assert rcv._runs == [[MSS, 3 * MSS]]
    assert rcv.on_segment(0, MSS) == 3 * MSS


# --- sender: growth --------------------------------------------------------


def test_slow_start_ack_opens_one_segment():
    loop, link, sender = make_sender(cwnd0=2)
    sender.start(0)
    loop.run_until(0)
    assert link.fresh_seqs() == [0, MSS]
    loop.run_until(ms(100))
    sender.on_ack(MSS)
    assert sender.controller.cwnd_segments() == 3.0
    # one segment acked with cwnd now 3: two more fit in the window
    assert link.fresh_seqs() == [0, MSS, 2 * MSS, 3 * MSS]


def test_congestion_avoidance_ack_adds_reciprocal():
    loop, link, sender = make_sender(cwnd0=10, ssthresh0=5.0)
    assert sender.state == "congestion_avoidance"
    sender.start(0)
    loop.run_until(0)
    sender.on_ack(MSS)
    assert sender.controller.cwnd_segments() == pytest.approx(10.1)


# --- sender: fast retransmit and recovery ----------------------------------


def test_third_dupack_halves_and_retransmits_once():
    loop, link, sender = make_sender(cwnd0=20, ssthresh0=44.0)
    sender.start(0)
    loop.run_until(0)
    assert len(link.fresh_seqs()) == 20
    loop.run_until(ms(100))
    for _ in range(3):
        sender.on_ack(0)
    assert sender.state == "fast_recovery"
    assert sender.controller.cwnd_segments() == 10.0
    assert sender.controller.ssthresh_segments() == 10.0
    assert sender.retransmissions == 1
    assert link.retx_seqs() == [0]
    assert len(sender.decreases) == 1


def test_extra_dupacks_inflate_the_window():
    loop, link, sender = make_sender(cwnd0=20)
    sender.start(0)
    loop.run_until(ms(100))
    for _ in range(3):
        sender.on_ack(0)
    assert sender.effective_window_segments() == 10 + 3
    sender.on_ack(0)
    assert sender.effective_window_segments() == 10 + 4


def test_partial_ack_repairs_next_hole_without_second_decrease():
    loop, link, sender = make_sender(cwnd0=20)
    sender.start(0)
    loop.run_until(ms(100))
    for _ in range(3):
        sender.on_ack(0)
    loop.run_until(ms(200))
    sender.on_ack(MSS)               # partial: recovery point is 20 segments
    assert sender.in_recovery
    assert link.retx_seqs() == [0, MSS]
    assert len(sender.decreases) == 1
    sender.on_ack(2 * MSS)
    assert link.retx_seqs() == [0, MSS, 2 * MSS]


def test_full_ack_exits_recovery_and_deflates():
    loop, link, sender = make_sender(cwnd0=20)
    sender.start(0)
    loop.run_until(ms(100))
    for _ in range(3):
        sender.on_ack(0)
    loop.run_until(ms(200))
    sender.on_ack(sender.recovery_point)
    assert not sender.in_recovery
    assert sender.effective_window_segments() == 10
    assert sender.dupack_count == 0


def test_recovery_timer_restarts_on_first_partial_only():
    loop, link, sender = make_sender(cwnd0=20)
    sender.start(0)
    loop.run_until(ms(100))
    for _ in range(3):
        sender.on_ack(0)
    assert sender._timer.fire_at == ms(100) + sender.rto_current_us
    loop.run_until(ms(200))
    sender.on_ack(MSS)
    first_partial_deadline = sender._timer.fire_at
    assert first_partial_deadline == ms(200) + sender.rto_current_us
    loop.run_until(ms(300))
    sender.on_ack(2 * MSS)
    assert sender._timer.fire_at == first_partial_deadline


# --- sender: timeout path --------------------------------------------------


def test_timeout_collapses_window_and_rewinds():
    loop, link, sender = make_sender(cwnd0=16)
    sender.start(0)
    loop.run_until(0)
    assert len(link.fresh_seqs()) == 16
    loop.run_until(seconds(2))
    assert sender.timeouts == 1
    assert sender.controller.cwnd_segments() == 1.0
    assert sender.controller.ssthresh_segments() == 8.0
    assert sender.decreases[-1][1] == "timeout"
    assert sender.snd_nxt == sender.snd_una == 0
    assert link.retx_seqs() == [0]
    assert sender.rto_current_us == 2_000_000


def test_repeated_timeouts_double_rto_to_cap():
    loop, link, sender = make_sender(cwnd0=4, rto_max_us=3_000_000)
    sender.start(0)
    loop.run_until(seconds(1))
    assert sender.rto_current_us == 2_000_000
    loop.run_until(seconds(3))
    assert sender.rto_current_us == 3_000_000
    loop.run_until(seconds(20))
    assert sender.rto_current_us == 3_000_000
    assert sender.timeouts >= 4


def test_cumulative_ack_skips_rewound_data_receiver_already_holds():
    loop, link, sender = make_sender(cwnd0=3)
    sender.start(0)
    loop.run_until(seconds(1))       # timeout; cursor rewinds, seq 0 resent
    # receiver actually held segments 1-2: the ack jumps past them
    sender.on_ack(3 * MSS)
    assert sender.snd_una == 3 * MSS
    assert sender.snd_nxt >= 3 * MSS
    assert link.retx_seqs() == [0]   # no pointless resend of 1 and 2


def test_dupacks_for_pre_timeout_data_cause_no_second_decrease():
    loop, link, sender = make_sender(cwnd0=5)
    sender.start(0)
    loop.run_until(seconds(1))       # timeout
    assert len(sender.decreases) == 1
    for _ in range(3):
        sender.on_ack(0)
    assert len(sender.decreases) == 1
    assert not sender.in_recovery


def test_karn_no_rtt_sample_from_retransmitted_segment():
    loop, link, sender = make_sender(cwnd0=2)
    sender.start(0)
    loop.run_until(seconds(1))       # timeout; segment 0 now retransmitted
    loop_now = loop.now
    sender.on_ack(MSS)
    assert sender.rtt_samples == []
    # the next fresh segment is probed again
    loop.run_until(loop_now + ms(100))
    probe = sender._probe
    assert probe is not None and probe.retx_count == 0
    sender.on_ack(probe.end)
    assert len(sender.rtt_samples) == 1


# --- sender: burst accounting ----------------------------------------------


def test_burst_of_one_for_isolated_loss():
    loop, link, sender = make_sender(cwnd0=10)
    sender.start(0)
    loop.run_until(ms(100))
    for _ in range(3):
        sender.on_ack(0)
    loop.run_until(ms(200))
    sender.on_ack(sender.recovery_point)
    assert sender.episodes == [(ms(200), 1)]


def test_burst_of_four_for_adjacent_holes():
    loop, link, sender = make_sender(cwnd0=12)
    sender.start(0)
    loop.run_until(ms(100))
    for _ in range(3):
        sender.on_ack(0)
    for k in (1, 2, 3):
        loop.run_until(ms(100 + 50 * k))
        sender.on_ack(k * MSS)
    loop.run_until(ms(400))
    sender.on_ack(sender.recovery_point)
    assert sender.episodes == [(ms(400), 4)]


def test_timeout_then_slow_start_resends_count_as_one_burst():
    loop, link, sender = make_sender(cwnd0=3)
    sender.start(0)
    loop.run_until(seconds(1))       # timeout resends segment 0
    loop.run_until(seconds(1) + ms(100))
    sender.on_ack(MSS)               # slow start resends segments 1 and 2
    assert link.retx_seqs() == [0, MSS, 2 * MSS]
    loop.run_until(seconds(1) + ms(200))
    sender.on_ack(3 * MSS)
    assert sender.episodes == [(seconds(1) + ms(200), 3)]


# --- sender: guards and edges ----------------------------------------------


def test_ack_beyond_highest_sent_byte_raises():
    loop, link, sender = make_sender(cwnd0=2)
    sender.start(0)
    loop.run_until(0)
    with pytest.raises(ProtocolError):
        sender.on_ack(5 * MSS)


def test_stale_ack_is_ignored():
    loop, link, sender = make_sender(cwnd0=4)
    sender.start(0)
    loop.run_until(ms(100))
    sender.on_ack(2 * MSS)
    before = (sender.dupack_count, sender.controller.cwnd_segments())
    sender.on_ack(MSS)
    assert (sender.dupack_count, sender.controller.cwnd_segments()) == before


def test_app_stop_drains_and_cancels_timer():
    loop, link, sender = make_sender(cwnd0=2)
    sender.app_stop_us = ms(50)
    sender.start(0)
    loop.run_until(ms(100))
    sender.on_ack(2 * MSS)
    assert sender.outstanding_bytes() == 0
    assert sender._timer is None
    assert loop.pending() == 0


def test_short_transfer_completes_and_reports():
    loop = EventLoop()
    cfg = TransportConfig()
    ctrl = make_controller("newreno", 2, 44.0, cfg.mss)
    done = []
    lcfg = LinkConfig(arq_frame_error_prob=0.0)
    link = BottleneckLink(loop, lcfg, random.Random(5))
    rcv = TcpReceiver()
    sender = TcpSender(loop, 0, cfg, ctrl, link, total_bytes=50 * 1024,
                       on_complete=done.append)

    def sink(packet):
        ack = rcv.on_segment(packet.seq, packet.payload_len)
        link.send_reverse(lambda a=ack: sender.on_ack(a))

    link.register_sink(0, sink)
    sender.start(0)
    loop.run_until(seconds(30))
    assert sender.done_at is not None
    assert done == [sender.done_at]
    assert sender.snd_una == 50 * 1024
    assert rcv.rcv_nxt == 50 * 1024
    assert sender.timeouts == 0
    assert loop.pending() == 0


def test_clean_channel_run_keeps_sender_and_receiver_consistent():
    loop = EventLoop()
    cfg = TransportConfig()
    ctrl = make_controller("newreno", 2, 44.0, cfg.mss)
    lcfg = LinkConfig(arq_frame_error_prob=0.0)
    link = BottleneckLink(loop, lcfg, random.Random(5))
    rcv = TcpReceiver()
    sender = TcpSender(loop, 0, cfg, ctrl, link)

    def sink(packet):
        ack = rcv.on_segment(packet.seq, packet.payload_len)
        link.send_reverse(lambda a=ack: sender.on_ack(a))

    link.register_sink(0, sink)
    sender.start(0)
    sender.app_stop_us = seconds(8)   # stop before growth can overflow the queue
    loop.run_until(seconds(20))
    assert sender.snd_una == rcv.rcv_nxt == sender.snd_max
    assert sender.retransmissions == 0 and sender.timeouts == 0
    assert rcv.duplicate_segments == 0
    assert link.quiescent_accounting_ok()

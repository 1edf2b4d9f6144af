"""Set up and execute one seeded run, then reduce it to metrics.

A run is fully determined by (configuration, seed): the link owns the
only RNG that shapes traffic, flow start offsets come from a second
generator derived from the seed, and all state lives on an integer
microsecond clock.  Rerunning the same pair must reproduce every
output byte.
"""

from __future__ import annotations

import json
import os
import random
from dataclasses import dataclass, field

from .cc import make_controller
from .config import LabConfig, SCENARIO_LONG, ScenarioSpec
from .engine import EventLoop, seconds
from .link import BottleneckLink, Packet
from .metrics import (FlowMetrics, goodput_bps, jain_fairness, retx_ratio,
                      throughput_bps)
from .transport import TcpReceiver, TcpSender

TIMESERIES_SCHEMA = "cclab-timeseries-v1"
SUMMARY_SCHEMA = "cclab-summary-v1"
TIMESERIES_COLUMNS = ("t_us", "flow_id", "variant", "cwnd_segments",
                      "ssthresh_segments", "srtt_us", "rto_us",
                      "bytes_acked_cum", "retx_cum", "timeouts_cum")

SHORT_RUN_HORIZON_S = 3600.0


@dataclass
class RunResult:
    run_index: int
    seed: int
    variant: str
    flows: list[FlowMetrics]
    jain_index: float
    aggregate_goodput_bps: float
    link_offered: int
    link_dropped: int
    link_delivered: int
    decrease_events: list[list[tuple]] = field(repr=False, default_factory=list)
    timeseries: list[tuple] = field(repr=False, default_factory=list)
    backlog_probe: object = field(repr=False, default=None)

    @property
    def per_flow_goodput_bps(self) -> list[float]:
        return [f.goodput_bps for f in self.flows]


class _FlowPipe:
    """Receiver side of one flow plus the ACK return path."""

    def __init__(self, loop: EventLoop, link: BottleneckLink, sender: TcpSender):
        self.loop = loop
        self.link = link
        self.sender = sender
        self.receiver = TcpReceiver()

    def on_packet(self, packet: Packet) -> None:
        ack = self.receiver.on_segment(packet.seq, packet.payload_len)
        self.link.send_reverse(lambda a=ack: self.sender.on_ack(a))


def run_single(config: LabConfig, seed: int, run_index: int = 0,
               variant: str | None = None, flows: int | None = None,
               scenario: ScenarioSpec | None = None,
               capture_timeseries: bool = False,
               keep_backlog_probe: bool = False) -> RunResult:
    """Simulate one run and reduce it to per-flow metrics."""
    variant = variant or config.variant
    n_flows = flows if flows is not None else config.flows
    scenario = scenario or config.scenario

    loop = EventLoop()
    link = BottleneckLink(loop, config.link, random.Random(seed))
    stagger_rng = random.Random(f"{seed}/stagger")

    total_bytes = scenario.size_bytes if scenario.kind != SCENARIO_LONG else None
    duration_us = seconds(scenario.duration_s)
    horizon_us = duration_us if scenario.kind == SCENARIO_LONG else seconds(SHORT_RUN_HORIZON_S)

    senders: list[TcpSender] = []
    for flow_id in range(n_flows):
        controller = make_controller(
            variant, config.transport.initial_cwnd_segments,
            config.transport.initial_ssthresh_segments, config.transport.mss,
            config.params_for(variant))
        sender = TcpSender(loop, flow_id, config.transport, controller, link,
                           total_bytes=total_bytes)
        if scenario.kind == SCENARIO_LONG:
            sender.app_stop_us = duration_us
        pipe = _FlowPipe(loop, link, sender)
        link.register_sink(flow_id, pipe.on_packet)
        start_at = round(stagger_rng.uniform(0.0, config.stagger_s) * 1_000_000)
        sender.start(start_at)
        senders.append(sender)

    timeseries: list[tuple] = []
    if capture_timeseries:
        interval_us = max(1, round(config.sample_interval_ms * 1000))

        def sample() -> None:
            t = loop.now
            for s in senders:
                c = s.controller
                timeseries.append((t, s.flow_id, variant, c.cwnd_segments(),
                                   c.ssthresh_segments(), s.srtt_us(),
                                   s.rto_current_us, s.snd_una,
                                   s.retransmissions, s.timeouts))
            if t < horizon_us and not all(s.done_at is not None for s in senders):
                loop.schedule_in(interval_us, sample)

        loop.schedule(0, sample)

    loop.run_until(horizon_us)

    flow_metrics = []
    decreases = []
    for s in senders:
        if s.first_send_at is None:
            raise RuntimeError(f"flow {s.flow_id} never started sending")
        if scenario.kind == SCENARIO_LONG:
            flow_duration = duration_us - s.first_send_at
        else:
            if s.done_at is None:
                raise RuntimeError(
                    f"flow {s.flow_id} did not finish its {scenario.size_kb} KB "
                    f"transfer within {SHORT_RUN_HORIZON_S:g} s")
            flow_duration = s.done_at - s.first_send_at
        unique = s.snd_una
        samples = s.rtt_samples
        mean_rtt = sum(r for _, r in samples) / len(samples) if samples else 0.0
        flow_metrics.append(FlowMetrics(
            flow_id=s.flow_id,
            variant=variant,
            duration_us=flow_duration,
            unique_bytes=unique,
            bytes_sent=s.bytes_sent,
            transmissions=s.transmissions,
            retransmissions=s.retransmissions,
            timeouts=s.timeouts,
            goodput_bps=goodput_bps(unique, flow_duration),
            throughput_bps=throughput_bps(s.bytes_sent, flow_duration),
            retx_ratio=retx_ratio(s.retransmissions, s.transmissions),
            mean_rtt_us=mean_rtt,
            rtt_samples=samples,
            retx_bursts=[n for _, n in s.episodes],
        ))
        decreases.append(list(s.decreases))

    goodputs = [m.goodput_bps for m in flow_metrics]
    return RunResult(
        run_index=run_index,
        seed=seed,
        variant=variant,
        flows=flow_metrics,
        jain_index=jain_fairness(goodputs),
        aggregate_goodput_bps=sum(goodputs),
        link_offered=link.offered,
        link_dropped=link.dropped_tail + link.dropped_arq,
        link_delivered=link.delivered,
        decrease_events=decreases,
        timeseries=timeseries,
        backlog_probe=link if keep_backlog_probe else None,
    )


# output writers

def format_segments(value: float) -> str:
    return "inf" if value == float("inf") else f"{value:.6f}"


def write_timeseries_csv(path: str, result: RunResult) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# {TIMESERIES_SCHEMA}\n")
        fh.write(",".join(TIMESERIES_COLUMNS) + "\n")
        for row in result.timeseries:
            (t, fid, var, cwnd, ssthresh, srtt, rto, acked, retx, tmo) = row
            fh.write(f"{t},{fid},{var},{format_segments(cwnd)},"
                     f"{format_segments(ssthresh)},{srtt},{rto},{acked},{retx},{tmo}\n")


def summary_dict(config: LabConfig, result: RunResult) -> dict:
    # key order is part of the format; insertion order is preserved on output
    return {
        "schema": SUMMARY_SCHEMA,
        "config_hash": config.config_hash(),
        "seed": result.seed,
        "run_index": result.run_index,
        "variant": result.variant,
        "flows": [
            {
                "flow_id": m.flow_id,
                "duration_us": m.duration_us,
                "unique_bytes": m.unique_bytes,
                "bytes_sent": m.bytes_sent,
                "transmissions": m.transmissions,
                "retransmissions": m.retransmissions,
                "timeouts": m.timeouts,
                "goodput_kbps": round(m.goodput_kbps, 3),
                "throughput_kbps": round(m.throughput_bps / 1000.0, 3),
                "retx_ratio": round(m.retx_ratio, 6),
                "mean_rtt_ms": round(m.mean_rtt_ms, 3),
                "rtt_sample_count": len(m.rtt_samples),
                "retx_bursts": m.retx_bursts,
            }
            for m in result.flows
        ],
        "aggregate": {
            "goodput_kbps": round(result.aggregate_goodput_bps / 1000.0, 3),
            "jain_index": round(result.jain_index, 6),
            "link_offered": result.link_offered,
            "link_dropped": result.link_dropped,
            "link_delivered": result.link_delivered,
        },
        "config": config.canonical_text(),
    }


def write_summary(path: str, config: LabConfig, result: RunResult) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(summary_dict(config, result), fh, indent=2)
        fh.write("\n")


def write_run_outputs(out_dir: str, config: LabConfig, result: RunResult) -> None:
    os.makedirs(out_dir, exist_ok=True)
    write_timeseries_csv(os.path.join(out_dir, "timeseries.csv"), result)
    write_summary(os.path.join(out_dir, "summary.json"), config, result)

"""Figure-style metrics computed from finished runs.

Everything here is a pure function of recorded numbers; nothing touches
the simulator.  Two percentile conventions are used on purpose: CDF
percentiles are order statistics (smallest value whose cumulative
fraction reaches the target), while box-and-whisker percentiles use
linear interpolation between order statistics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


def goodput_bps(unique_bytes: int, duration_us: int) -> float:
    """Application bytes delivered once, over the measured window."""
    if duration_us <= 0:
        raise ValueError("goodput needs a positive duration")
    return unique_bytes * 8 * 1_000_000 / duration_us


def throughput_bps(total_bytes_sent: int, duration_us: int) -> float:
    """All payload bytes sent, retransmissions included."""
    if duration_us <= 0:
        raise ValueError("throughput needs a positive duration")
    return total_bytes_sent * 8 * 1_000_000 / duration_us


def retx_ratio(retransmissions: int, transmissions: int) -> float:
    if transmissions <= 0:
        return 0.0
    return retransmissions / transmissions


def jain_fairness(values: list[float]) -> float:
    """(sum x)^2 / (n * sum x^2); 1 is perfect equality, 1/n total skew."""
    if not values:
        raise ValueError("fairness index of an empty set")
    if any(v < 0 for v in values):
        raise ValueError("fairness index needs nonnegative inputs")
    square_sum = sum(v * v for v in values)
    if square_sum == 0:
        raise ValueError("fairness index undefined when every value is zero")
    total = sum(values)
    return (total * total) / (len(values) * square_sum)


def empirical_cdf(samples: list[float]) -> list[tuple[float, float]]:
    """Right-continuous step CDF as (value, fraction <= value) points."""
    if not samples:
        raise ValueError("empirical cdf of an empty sample set")
    ordered = sorted(samples)
    n = len(ordered)
    points: list[tuple[float, float]] = []
    for i, v in enumerate(ordered):
        if i + 1 < n and ordered[i + 1] == v:
            continue  # keep only the last index of a tie
        points.append((v, (i + 1) / n))
    return points


def cdf_percentile(samples: list[float], q: float) -> float:
    """Smallest sample whose cumulative fraction reaches q (0 < q <= 1)."""
    if not samples:
        raise ValueError("percentile of an empty sample set")
    if not 0.0 < q <= 1.0:
        raise ValueError("q must be in (0, 1]")
    ordered = sorted(samples)
    rank = math.ceil(q * len(ordered))
    return ordered[rank - 1]


def _interp_percentile(ordered: list[float], q: float) -> float:
    # linear interpolation between closest order statistics
    pos = q * (len(ordered) - 1)
    lo = int(pos)
    hi = min(lo + 1, len(ordered) - 1)
    frac = pos - lo
    return ordered[lo] + (ordered[hi] - ordered[lo]) * frac


@dataclass
class BoxWhisker:
    q1: float
    median: float
    q3: float
    whisker_lo: float
    whisker_hi: float
    mean: float
    n: int


def box_whisker(samples: list[float]) -> BoxWhisker:
    """Quartile box with whiskers at the farthest samples within 1.5 IQR."""
    if not samples:
        raise ValueError("box summary of an empty sample set")
    ordered = sorted(samples)
    q1 = _interp_percentile(ordered, 0.25)
    median = _interp_percentile(ordered, 0.5)
    q3 = _interp_percentile(ordered, 0.75)
    reach = 1.5 * (q3 - q1)
    lo_limit = q1 - reach
    hi_limit = q3 + reach
    whisker_lo = min(v for v in ordered if v >= lo_limit)
    whisker_hi = max(v for v in ordered if v <= hi_limit)
    return BoxWhisker(q1, median, q3, whisker_lo, whisker_hi,
                      sum(ordered) / len(ordered), len(ordered))


def representative_flow(vectors: list[tuple[float, ...]], normalize: bool = False) -> int:
    """Index of the run closest (euclidean) to the componentwise mean.

    Ties go to the lowest index.  With normalize=True each component is
    divided by its mean first, so differently scaled components weigh
    equally.
    """
    if not vectors:
        raise ValueError("representative flow of an empty set")
    dims = len(vectors[0])
    if any(len(v) != dims for v in vectors):
        raise ValueError("vectors must share a dimension")
    n = len(vectors)
    means = [sum(v[d] for v in vectors) / n for d in range(dims)]
    if normalize:
        scales = [m if m != 0 else 1.0 for m in means]
    else:
        scales = [1.0] * dims
    best_idx = 0
    best_dist = math.inf
    for i, v in enumerate(vectors):
        dist = sum(((v[d] - means[d]) / scales[d]) ** 2 for d in range(dims))
        if dist < best_dist:
            best_dist = dist
            best_idx = i
    return best_idx


@dataclass
class FlowMetrics:
    flow_id: int
    variant: str
    duration_us: int
    unique_bytes: int
    bytes_sent: int
    transmissions: int
    retransmissions: int
    timeouts: int
    goodput_bps: float
    throughput_bps: float
    retx_ratio: float
    mean_rtt_us: float
    rtt_samples: list[tuple[int, int]] = field(repr=False, default_factory=list)
    retx_bursts: list[int] = field(default_factory=list)

    @property
    def goodput_kbps(self) -> float:
        return self.goodput_bps / 1000.0

    @property
    def mean_rtt_ms(self) -> float:
        return self.mean_rtt_us / 1000.0

"""Shared fixtures for the acceptance suite.

The comparison campaigns are the expensive part: dozens of seeded runs
per variant.  They are computed once per session and shared by every
criterion that reads them.
"""

import pytest

from cclab.config import LabConfig, parse_scenario
from cclab.runner import run_single

VARIANTS = ("newreno", "westwood+", "bic", "cubic")

SINGLE_FLOW_SEEDS = tuple(range(1, 21))
MULTI_FLOW_SEEDS = tuple(range(1, 6))
SHORT_SEEDS = tuple(range(1, 11))
PROBE_SEEDS = (1, 2, 3)


@pytest.fixture(scope="session")
def single_flow_campaign():
    """variant -> list of 180 s single-flow RunResult over 20 seeds."""
    config = LabConfig()
    return {
        variant: [run_single(config, seed=seed, variant=variant)
                  for seed in SINGLE_FLOW_SEEDS]
        for variant in VARIANTS
    }


@pytest.fixture(scope="session")
def multi_flow_campaign():
    """(variant, flows) -> list of 600 s homogeneous RunResult over 5 seeds."""
    config = LabConfig()
    config.scenario = parse_scenario("long_lived")
    config.scenario.duration_s = 600.0
    return {
        (variant, flows): [run_single(config, seed=seed, variant=variant,
                                      flows=flows)
                           for seed in MULTI_FLOW_SEEDS]
        for variant in VARIANTS for flows in (2, 3, 4)
    }


@pytest.fixture(scope="session")
def short_transfer_campaign():
    """(variant, size_kb) -> list of short-transfer RunResult over 10 seeds."""
    config = LabConfig()
    out = {}
    for variant in VARIANTS:
        for size_kb in (50, 500, 1000):
            scenario = parse_scenario(f"short:{size_kb}")
            out[(variant, size_kb)] = [
                run_single(config, seed=seed, variant=variant, scenario=scenario)
                for seed in SHORT_SEEDS
            ]
    return out


@pytest.fixture(scope="session")
def backlog_probe_runs():
    """variant -> single-flow runs that kept the link for backlog replay."""
    config = LabConfig()
    return {
        variant: [run_single(config, seed=seed, variant=variant,
                             keep_backlog_probe=True)
                  for seed in PROBE_SEEDS]
        for variant in ("westwood+", "newreno")
    }

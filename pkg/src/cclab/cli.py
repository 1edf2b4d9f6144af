"""Command line front end.

Three subcommands:

  run     one experiment (variant, flow count, scenario, seed) -> CSV + JSON
  matrix  full sweep over variants x flow counts x scenarios -> tables + CDFs
  stats   recompute summary figures from a run directory and verify them

All options have working defaults, so `cclab run` with no arguments
produces a complete single-flow trace in ./out.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import metrics
from .config import SHORT_SIZES_KB, LabConfig, load_config, parse_scenario
from .matrix import run_matrix, write_matrix_outputs
from .runner import run_single, summary_dict, write_run_outputs


def _load_base(args) -> LabConfig:
    if args.config:
        config = load_config(args.config)
    else:
        config = LabConfig()
    if getattr(args, "seed", None) is not None:
        config.seed = args.seed
    if getattr(args, "out", None):
        config.out_dir = args.out
    if getattr(args, "workers", None) is not None:
        config.workers = args.workers
    return config


def _apply_run_overrides(config: LabConfig, args) -> None:
    if args.variant:
        config.variant = args.variant
    if args.flows is not None:
        config.flows = args.flows
    if args.size is not None:
        config.scenario = parse_scenario(f"short:{args.size}")
    elif args.duration is not None:
        config.scenario = parse_scenario("long_lived")
        config.scenario.duration_s = args.duration
    config.validate()


def cmd_run(args) -> int:
    config = _load_base(args)
    _apply_run_overrides(config, args)
    out_dir = config.out_dir or "out"
    result = run_single(config, seed=config.seed, capture_timeseries=True)
    write_run_outputs(out_dir, config, result)
    for fm in result.flows:
        print(f"flow {fm.flow_id} [{fm.variant}]: goodput {fm.goodput_kbps:.1f} Kbps, "
              f"mean RTT {fm.mean_rtt_ms:.1f} ms, retx {fm.retx_ratio * 100:.2f}%, "
              f"timeouts {fm.timeouts}")
    print(f"aggregate goodput {result.aggregate_goodput_bps / 1000:.1f} Kbps, "
          f"fairness {result.jain_index:.4f}")
    print(f"outputs in {out_dir}/")
    return 0


def cmd_matrix(args) -> int:
    config = _load_base(args)
    config.validate()
    out_dir = config.out_dir or "matrix_out"
    cells = run_matrix(config)
    write_matrix_outputs(out_dir, config, cells)
    failed = [c for c in cells if not c.ok]
    for cell in cells:
        status = "ok" if cell.ok else f"FAILED: {cell.error}"
        print(f"[{cell.scenario_tag} flows={cell.flows} {cell.variant}] {status}")
    print(f"{len(cells) - len(failed)}/{len(cells)} cells ok; outputs in {out_dir}/")
    return 1 if failed else 0


def _recheck_stored_summary(stored: dict) -> list[str]:
    """Recompute derived figures from the stored counters; list mismatches."""
    mismatches = []
    goodputs = []
    for fm in stored["flows"]:
        fid = fm["flow_id"]
        goodput = fm["unique_bytes"] * 8 * 1000 / fm["duration_us"]
        goodputs.append(goodput)
        if round(goodput, 3) != fm["goodput_kbps"]:
            mismatches.append(f"flow {fid} goodput")
        throughput = fm["bytes_sent"] * 8 * 1000 / fm["duration_us"]
        if round(throughput, 3) != fm["throughput_kbps"]:
            mismatches.append(f"flow {fid} throughput")
        ratio = metrics.retx_ratio(fm["retransmissions"], fm["transmissions"])
        if round(ratio, 6) != fm["retx_ratio"]:
            mismatches.append(f"flow {fid} retx_ratio")
    agg = stored["aggregate"]
    if round(sum(goodputs), 3) != agg["goodput_kbps"]:
        mismatches.append("aggregate goodput")
    if round(metrics.jain_fairness(goodputs), 6) != agg["jain_index"]:
        mismatches.append("jain index")
    if load_config(text=stored["config"]).config_hash() != stored["config_hash"]:
        mismatches.append("config hash")
    return mismatches


def cmd_stats(args) -> int:
    summary_path = os.path.join(args.run_dir, "summary.json")
    with open(summary_path, encoding="utf-8") as fh:
        stored = json.load(fh)
    mismatches = _recheck_stored_summary(stored)
    if args.replay:
        config = load_config(text=stored["config"])
        recomputed = summary_dict(
            config,
            run_single(config, seed=stored["seed"], run_index=stored["run_index"]),
        )
        for section in ("flows", "aggregate"):
            if recomputed[section] != stored[section]:
                mismatches.append(f"replay {section}")
    for fm in stored["flows"]:
        print(f"flow {fm['flow_id']} [{stored['variant']}]: "
              f"goodput {fm['goodput_kbps']:.1f} Kbps, "
              f"mean RTT {fm['mean_rtt_ms']:.1f} ms, "
              f"retx {fm['retx_ratio'] * 100:.2f}%, timeouts {fm['timeouts']}")
    agg = stored["aggregate"]
    print(f"aggregate goodput {agg['goodput_kbps']:.1f} Kbps, "
          f"fairness {agg['jain_index']:.4f}")
    if mismatches:
        print(f"VERIFY FAILED: {', '.join(mismatches)}")
        return 1
    print("verify ok: recomputed figures match the stored summary"
          + (" and a fresh replay" if args.replay else ""))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cclab",
        description="congestion control laboratory over a simulated cellular link")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one experiment")
    run_p.add_argument("--config", help="INI config file")
    run_p.add_argument("--seed", type=int, help="base RNG seed")
    run_p.add_argument("--variant", choices=["newreno", "westwood+", "westwood",
                                             "bic", "cubic"],
                       help="congestion control variant")
    run_p.add_argument("--flows", type=int, help="number of concurrent flows")
    run_p.add_argument("--duration", type=float,
                       help="long-lived scenario duration in seconds")
    run_p.add_argument("--size", type=int, choices=sorted(SHORT_SIZES_KB),
                       help="short transfer size in KB (overrides --duration)")
    run_p.add_argument("--out", help="output directory (default out)")
    run_p.set_defaults(func=cmd_run)

    matrix_p = sub.add_parser("matrix", help="run the full comparison sweep")
    matrix_p.add_argument("--config", help="INI config file")
    matrix_p.add_argument("--seed", type=int, help="base RNG seed")
    matrix_p.add_argument("--out", help="output directory (default matrix_out)")
    matrix_p.add_argument("--workers", type=int,
                          help="process pool size for independent cells")
    matrix_p.set_defaults(func=cmd_matrix)

    stats_p = sub.add_parser("stats", help="recompute and verify a run summary")
    stats_p.add_argument("run_dir", help="directory produced by `cclab run`")
    stats_p.add_argument("--replay", action="store_true",
                         help="also re-simulate from the embedded config and compare")
    stats_p.set_defaults(func=cmd_stats)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Subcommands wrap the library: `run` (one realization, prints the final
allocation), `oracle` (exhaustive optimum and gap report), `convergence`
and `compare` (the two Monte Carlo studies), `dump-channel` and
`load-channel` (JSON replay fixtures). Every subcommand echoes the
effective configuration to stdout first; re-running from that echo
reproduces the results bit for bit.

Exit codes: 0 success, 1 a validation invariant failed (details on
stderr), 2 bad usage or config.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .auction import run_auction
from .channel import SeedStreams, generate_topology, realize_link_budget
from .channel_io import dump_channel, load_channel
from .config import ConfigError, SimulationConfig, config_from_dict, parse_config
from .experiments import (ComparisonStudy, ConvergenceStudy, empirical_cdf,
                          run_comparison_study, run_convergence_study)
from .model import check_feasibility, sum_rate
from .oracle import (InfeasibleInstance, InstanceTooLarge, exhaustive_optimum,
                     iteration_bound, k_epsilon_gap)


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None,
                        help="JSON config file; omitted fields use defaults")
    common.add_argument("--seed", type=int, default=None,
                        help="override the plan seed")
    common.add_argument("--out", type=Path, default=Path("out"),
                        help="output directory (default ./out)")
    common.add_argument("--format", choices=("csv", "json"), default="csv",
                        help="allocation output format for run/oracle/load-channel")
    common.add_argument("--jobs", type=int, default=1,
                        help="realization-level parallelism for the studies")

    parser = argparse.ArgumentParser(
        prog="auctionsim",
        description="Distributed-auction RB/power allocation simulator")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common],
                   help="single realization, print final allocation")
    sub.add_parser("oracle", parents=[common],
                   help="exhaustive optimum and gap report")
    sub.add_parser("convergence", parents=[common],
                   help="rounds-to-convergence study")
    sub.add_parser("compare", parents=[common], help="auction vs oracle study")
    sub.add_parser("dump-channel", parents=[common],
                   help="write one channel realization as JSON")
    load = sub.add_parser("load-channel", parents=[common],
                          help="replay a dumped channel")
    load.add_argument("channel", type=Path, help="channel JSON file")
    return parser


def _load_config(args) -> SimulationConfig:
    cfg = parse_config(args.config) if args.config else config_from_dict({})
    if args.seed is not None:
        data = cfg.effective()
        data["plan"]["seed"] = args.seed
        cfg = config_from_dict(data)
    return cfg


def _echo(cfg: SimulationConfig) -> None:
    print("effective config:")
    print(json.dumps(cfg.effective(), indent=2))


def _realize(cfg: SimulationConfig, realization: int = 0, slot: int = 0):
    streams = SeedStreams(cfg.seed)
    topo = generate_topology(cfg.dims, cfg.propagation,
                             streams.topology(realization))
    budget = realize_link_budget(topo, cfg.dims, cfg.propagation,
                                 streams.shadowing(realization))
    gains = budget.gains(streams.fading(realization, slot))
    return streams, topo, gains


def _allocation_doc(cfg: SimulationConfig, result, gains) -> dict:
    power = cfg.power()
    spec = cfg.interference()
    alloc = result.alloc
    report = check_feasibility(alloc, gains, power, spec)
    rows = [{"transmitter": k, "rb": int(alloc.rb[k]), "level": int(alloc.level[k]),
             "power_dbm": cfg.levels_dbm[int(alloc.level[k])]}
            for k in range(alloc.transmitters)]
    return {
        "allocation": rows,
        "sum_rate_bps": cfg.auction.nu1 * sum_rate(alloc, gains, power, spec),
        "converged": result.converged,
        "rounds": result.rounds,
        "feasible": report.ok,
    }


def _print_allocation(doc: dict, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(doc, indent=2))
        return
    print("transmitter,rb,level,power_dbm")
    for row in doc["allocation"]:
        print(f"{row['transmitter']},{row['rb']},{row['level']},{row['power_dbm']!r}")
    print(f"sum_rate_bps,{doc['sum_rate_bps']!r}")
    print(f"converged,{int(doc['converged'])}")
    print(f"rounds,{doc['rounds']}")
    print(f"feasible,{int(doc['feasible'])}")


def _run_invariants(cfg: SimulationConfig, result, gains) -> list:
    """Machine-checkable per-run invariants; returns violation messages."""
    power = cfg.power()
    spec = cfg.interference()
    problems = []
    if result.converged and not check_feasibility(result.alloc, gains, power,
                                                  spec).ok:
        problems.append("converged allocation violates an interference threshold")
    if not result.safety_ok:
        problems.append("a reassignment went through with an estimate at or "
                        "above the threshold")
    low, high = result.trace.benefit_envelope()
    # iteration_bound wants a (K, N, L) benefit table; only its spread
    # matters, so the run's benefit envelope stands in for the table.
    cap, _ = iteration_bound(np.array([low, high]).reshape(1, 1, 2), cfg.auction)
    if int(result.trace.bid_rounds.max()) > cap:
        problems.append(f"a resource received more than {cap} bids")
    return problems


def cmd_run(cfg: SimulationConfig, args) -> int:
    _echo(cfg)
    _, _, gains = _realize(cfg)
    result = run_auction(gains, cfg.power(), cfg.interference(), cfg.auction,
                         SeedStreams(cfg.seed).auction_init(0, 0))
    _print_allocation(_allocation_doc(cfg, result, gains), args.format)
    problems = _run_invariants(cfg, result, gains)
    for p in problems:
        print(f"invariant violated: {p}", file=sys.stderr)
    return 1 if problems else 0


def cmd_oracle(cfg: SimulationConfig, args) -> int:
    _echo(cfg)
    _, _, gains = _realize(cfg)
    power = cfg.power()
    spec = cfg.interference()
    try:
        oracle = exhaustive_optimum(gains, power, spec, cfg.auction)
    except InstanceTooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except InfeasibleInstance as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    result = run_auction(gains, power, spec, cfg.auction,
                         SeedStreams(cfg.seed).auction_init(0, 0))
    auction_value = cfg.auction.nu1 * sum_rate(result.alloc, gains, power, spec)
    gap, within = k_epsilon_gap(oracle.weighted_sum_rate, auction_value,
                                cfg.dims.transmitters, cfg.auction)
    doc = _allocation_doc(cfg, result, gains)
    doc["oracle_sum_rate_bps"] = oracle.weighted_sum_rate
    doc["gap_bps"] = gap
    doc["k_epsilon"] = cfg.dims.transmitters * cfg.auction.epsilon
    doc["within_k_epsilon"] = within
    doc["oracle_kernel"] = oracle.kernel
    if args.format == "json":
        print(json.dumps(doc, indent=2))
    else:
        _print_allocation({k: doc[k] for k in
                           ("allocation", "sum_rate_bps", "converged", "rounds",
                            "feasible")}, "csv")
        print(f"oracle_sum_rate_bps,{doc['oracle_sum_rate_bps']!r}")
        print(f"gap_bps,{doc['gap_bps']!r}")
        print(f"k_epsilon,{doc['k_epsilon']!r}")
        print(f"within_k_epsilon,{int(doc['within_k_epsilon'])}")
    problems = []
    if gap < -1e-6:
        problems.append("auction rate exceeds the exhaustive optimum")
    problems.extend(_run_invariants(cfg, result, gains))
    for p in problems:
        print(f"invariant violated: {p}", file=sys.stderr)
    return 1 if problems else 0


def _validate_convergence(study: ConvergenceStudy) -> list:
    problems = []
    by_nodes = {}
    for s in study.samples:
        if s.converged:
            by_nodes.setdefault(s.nodes, []).append(s.rounds)
    for nodes, rounds in sorted(by_nodes.items()):
        values = [empirical_cdf(rounds, j) for j in range(0, int(max(rounds)) + 1)]
        if any(b < a for a, b in zip(values, values[1:])):
            problems.append(f"CDF not monotone for {nodes} nodes")
        if values[-1] != 1.0:
            problems.append(f"CDF does not end at 1 for {nodes} nodes")
    return problems


def _validate_comparison(study: ComparisonStudy, k_count: int, epsilon: float) -> list:
    problems = []
    kexc = 0
    for realization, slot, r_prop, r_max, eta in study.rows:
        if math.isnan(eta):
            continue
        if r_prop > r_max + 1e-6:
            problems.append(f"realization {realization} slot {slot}: auction rate "
                            f"exceeds the oracle optimum")
        if r_max - r_prop > k_count * epsilon:
            kexc += 1
    if kexc:
        problems.append(f"gap above K*epsilon on {kexc} rows")
    return problems


def cmd_convergence(cfg: SimulationConfig, args) -> int:
    _echo(cfg)
    study = run_convergence_study(cfg.plan(), out_dir=args.out, jobs=args.jobs)
    print(f"samples: {study.samples_path}")
    print(f"cdf: {study.cdf_path}")
    print(f"trace: {study.trace_path}")
    print(f"unconverged: {study.unconverged}")
    problems = _validate_convergence(study)
    for p in problems:
        print(f"invariant violated: {p}", file=sys.stderr)
    return 1 if problems else 0


def cmd_compare(cfg: SimulationConfig, args) -> int:
    _echo(cfg)
    study = run_comparison_study(cfg.plan(), out_dir=args.out, jobs=args.jobs)
    print(f"comparison: {study.path}")
    print(f"mean_eta,{study.mean_eta!r}")
    problems = _validate_comparison(study, cfg.dims.transmitters,
                                    cfg.auction.epsilon)
    for p in problems:
        print(f"invariant violated: {p}", file=sys.stderr)
    return 1 if problems else 0


def cmd_dump_channel(cfg: SimulationConfig, args) -> int:
    _echo(cfg)
    args.out.mkdir(parents=True, exist_ok=True)
    _, topo, gains = _realize(cfg)
    path = args.out / "channel.json"
    dump_channel(path, gains, topo)
    print(f"channel: {path}")
    return 0


def cmd_load_channel(cfg: SimulationConfig, args) -> int:
    _echo(cfg)
    gains, _ = load_channel(args.channel)
    result = run_auction(gains, cfg.power(), cfg.interference(), cfg.auction,
                         SeedStreams(cfg.seed).auction_init(0, 0))
    _print_allocation(_allocation_doc(cfg, result, gains), args.format)
    problems = _run_invariants(cfg, result, gains)
    for p in problems:
        print(f"invariant violated: {p}", file=sys.stderr)
    return 1 if problems else 0


_COMMANDS = {
    "run": cmd_run,
    "oracle": cmd_oracle,
    "convergence": cmd_convergence,
    "compare": cmd_compare,
    "dump-channel": cmd_dump_channel,
    "load-channel": cmd_load_channel,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _load_config(args)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return _COMMANDS[args.command](cfg, args)


if __name__ == "__main__":
    sys.exit(main())

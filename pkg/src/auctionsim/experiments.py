"""Monte Carlo studies: convergence behaviour and rate-vs-oracle comparison.

Two harnesses share one plan type. The convergence study draws a fresh
topology per realization, runs the auction once and records the number
of rounds to convergence (infinity sentinel when `t_max` is hit). The
comparison study keeps each realization's topology and shadowing fixed
over a window of time slots, redraws fast fading per slot, and runs the
auction and the exhaustive oracle on identical gains.

Every CSV cell is written as repr() of the value, so re-running a plan
with the same seed produces byte-identical files.
"""

from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .auction import AuctionParams, run_auction
from .channel import (PropagationParams, SeedStreams, generate_topology,
                      realize_link_budget)
from .model import (InterferenceSpec, PowerLevelTable, ScenarioDims,
                    check_feasibility, sum_rate)
from .oracle import InfeasibleInstance, exhaustive_optimum

log = logging.getLogger(__name__)

SAMPLES_HEADER = ("scenario", "nodes", "realization", "rounds", "converged")
CDF_HEADER = ("nodes", "rounds", "cdf")
TRACE_HEADER = ("scenario", "realization", "round", "sum_rate_bps")
COMPARISON_HEADER = ("realization", "slot", "r_prop_bps", "r_max_bps", "eta")


@dataclass(frozen=True)
class ScenarioPoint:
    """One grid point: S small cells, D D2D pairs, a power-level set."""

    small_cells: int
    d2d_pairs: int
    levels_dbm: tuple

    def __post_init__(self):
        if self.small_cells < 0 or self.d2d_pairs < 0:
            raise ValueError("scenario counts must be >= 0")
        if self.small_cells + self.d2d_pairs < 1:
            raise ValueError("scenario needs at least one underlay transmitter")
        if len(self.levels_dbm) < 1:
            raise ValueError("scenario needs at least one power level")
        object.__setattr__(self, "levels_dbm",
                           tuple(float(v) for v in self.levels_dbm))

    @property
    def nodes(self) -> int:
        return self.small_cells + self.d2d_pairs

    @property
    def label(self) -> str:
        levels = ",".join(f"{v:g}" for v in self.levels_dbm)
        return f"S{self.small_cells}-D{self.d2d_pairs}-L{levels}"


@dataclass(frozen=True)
class ExperimentPlan:
    scenarios: tuple
    realizations: int = 50
    slots: int = 50
    seed: int = 0
    mues: int = 6
    rbs: int = 6
    mbs_power_dbm: float = 43.0
    threshold_dbm: float = -70.0
    noise_psd_dbm_hz: float = -174.0
    bandwidth_hz: float = 1.08e6
    propagation: PropagationParams = field(default_factory=PropagationParams)
    auction: AuctionParams = field(default_factory=AuctionParams)

    def __post_init__(self):
        object.__setattr__(self, "scenarios", tuple(self.scenarios))
        if not self.scenarios:
            raise ValueError("plan.scenarios must not be empty")
        if self.realizations < 1:
            raise ValueError("plan.realizations must be >= 1")
        if self.slots < 1:
            raise ValueError("plan.slots must be >= 1")
        if self.bandwidth_hz <= 0.0:
            raise ValueError("plan.bandwidth_hz must be > 0")

    def dims(self, scenario: ScenarioPoint) -> ScenarioDims:
        return ScenarioDims(self.mues, scenario.small_cells, scenario.d2d_pairs,
                            self.rbs, len(scenario.levels_dbm))

    def power(self, scenario: ScenarioPoint) -> PowerLevelTable:
        return PowerLevelTable.from_mbs_total(scenario.levels_dbm,
                                              self.mbs_power_dbm, self.rbs)

    def interference(self) -> InterferenceSpec:
        return InterferenceSpec.uniform(self.threshold_dbm, self.rbs,
                                        self.noise_psd_dbm_hz,
                                        self.bandwidth_hz / self.rbs)


def empirical_cdf(samples, j) -> float:
    """Fraction of samples at or below j."""
    samples = list(samples)
    if not samples:
        raise ValueError("empirical_cdf needs at least one sample")
    return sum(1 for z in samples if z <= j) / len(samples)


def efficiency(r_prop: float, r_max: float) -> float:
    """Achieved-over-optimal rate ratio, deliberately unclamped: a value
    above 1 means the reference is not actually an upper bound."""
    if not r_max > 0.0:
        raise ValueError(f"r_max must be > 0, got {r_max!r}")
    return r_prop / r_max


@dataclass
class ConvergenceSample:
    scenario: str
    nodes: int
    realization: int
    rounds: float        # math.inf when t_max was hit
    converged: bool


@dataclass
class ConvergenceStudy:
    samples: list
    trace_rows: list     # (scenario, realization, round, sum_rate_bps)
    unconverged: int
    samples_path: Path = None
    cdf_path: Path = None
    trace_path: Path = None

    def rounds_of(self, scenario: ScenarioPoint) -> list:
        return [s.rounds for s in self.samples
                if s.scenario == scenario.label and s.converged]


@dataclass
class ComparisonStudy:
    rows: list           # (realization, slot, r_prop, r_max, eta)
    mean_rows: list      # ("mean", slot, ...) averages across realizations
    oracle_infeasible: int
    path: Path = None

    @property
    def mean_eta(self) -> float:
        etas = [r[4] for r in self.rows if not math.isnan(r[4])]
        return sum(etas) / len(etas)


def _cell(value) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path: Path, header, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def _convergence_task(args):
    plan, scenario, realization = args
    dims = plan.dims(scenario)
    power = plan.power(scenario)
    spec = plan.interference()
    streams = SeedStreams(plan.seed)
    topo = generate_topology(dims, plan.propagation, streams.topology(realization))
    budget = realize_link_budget(topo, dims, plan.propagation,
                                 streams.shadowing(realization))
    gains = budget.gains(streams.fading(realization))
    result = run_auction(gains, power, spec, plan.auction,
                         streams.auction_init(realization))
    rounds = float(result.rounds) if result.converged else math.inf
    trace = [(scenario.label, realization, rec.round, rec.sum_rate_bps)
             for rec in result.trace.records]
    return ConvergenceSample(scenario.label, scenario.nodes, realization,
                             rounds, result.converged), trace


def _map_tasks(task_fn, args_list, jobs: int):
    if jobs <= 1:
        return [task_fn(a) for a in args_list]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(task_fn, args_list))


def run_convergence_study(plan: ExperimentPlan, out_dir=None,
                          jobs: int = 1) -> ConvergenceStudy:
    """Rounds-to-convergence samples over the plan's scenario grid.

    Emits three CSVs under out_dir when given: the raw samples, the
    per-node-count CDF table (non-converged runs excluded, their count
    logged), and the per-round sum-rate traces.
    """
    args = [(plan, sc, i) for sc in plan.scenarios
            for i in range(plan.realizations)]
    outcomes = _map_tasks(_convergence_task, args, jobs)
    samples = [sample for sample, _ in outcomes]
    trace_rows = [row for _, trace in outcomes for row in trace]

    unconverged = sum(1 for s in samples if not s.converged)
    if unconverged:
        log.info("convergence study: %d/%d runs hit t_max and are excluded "
                 "from the CDF", unconverged, len(samples))

    cdf_rows = []
    for nodes in sorted({s.nodes for s in samples}):
        finite = [s.rounds for s in samples if s.nodes == nodes and s.converged]
        if not finite:
            continue
        for j in range(1, int(max(finite)) + 1):
            cdf_rows.append((nodes, j, empirical_cdf(finite, j)))

    study = ConvergenceStudy(samples, trace_rows, unconverged)
    if out_dir is not None:
        out_dir = Path(out_dir)
        study.samples_path = out_dir / "convergence_samples.csv"
        study.cdf_path = out_dir / "convergence_cdf.csv"
        study.trace_path = out_dir / "convergence_trace.csv"
        _write_csv(study.samples_path, SAMPLES_HEADER,
                   [(s.scenario, s.nodes, s.realization, s.rounds, s.converged)
                    for s in samples])
        _write_csv(study.cdf_path, CDF_HEADER, cdf_rows)
        _write_csv(study.trace_path, TRACE_HEADER, trace_rows)
    return study


def _comparison_task(args):
    plan, scenario, realization = args
    dims = plan.dims(scenario)
    power = plan.power(scenario)
    spec = plan.interference()
    streams = SeedStreams(plan.seed)
    topo = generate_topology(dims, plan.propagation, streams.topology(realization))
    budget = realize_link_budget(topo, dims, plan.propagation,
                                 streams.shadowing(realization))
    rows = []
    infeasible = 0
    for slot in range(plan.slots):
        gains = budget.gains(streams.fading(realization, slot))
        result = run_auction(gains, power, spec, plan.auction,
                             streams.auction_init(realization, slot))
        r_prop = plan.auction.nu1 * sum_rate(result.alloc, gains, power, spec)
        try:
            oracle = exhaustive_optimum(gains, power, spec, plan.auction)
            r_max = oracle.weighted_sum_rate
            eta = efficiency(r_prop, r_max)
        except InfeasibleInstance:
            infeasible += 1
            r_max = math.nan
            eta = math.nan
        rows.append((realization, slot, r_prop, r_max, eta))
    return rows, infeasible


def run_comparison_study(plan: ExperimentPlan, out_dir=None,
                         jobs: int = 1) -> ComparisonStudy:
    """Auction vs exhaustive optimum on identical gains, slot by slot.

    The plan must hold exactly one scenario point (the study's CSV has
    no scenario column). Per-slot averages across realizations are
    appended as rows whose realization column reads "mean".
    """
    if len(plan.scenarios) != 1:
        raise ValueError("comparison study expects exactly one scenario point")
    scenario = plan.scenarios[0]
    args = [(plan, scenario, i) for i in range(plan.realizations)]
    outcomes = _map_tasks(_comparison_task, args, jobs)
    rows = [row for chunk, _ in outcomes for row in chunk]
    oracle_infeasible = sum(n for _, n in outcomes)
    if oracle_infeasible:
        log.info("comparison study: %d/%d slots had no feasible assignment at "
                 "all and carry nan", oracle_infeasible, len(rows))

    mean_rows = []
    for slot in range(plan.slots):
        of_slot = [r for r in rows if r[1] == slot]
        defined = [r for r in of_slot if not math.isnan(r[4])]
        if not defined:
            mean_rows.append(("mean", slot, math.nan, math.nan, math.nan))
            continue
        mean_rows.append(("mean", slot,
                          sum(r[2] for r in defined) / len(defined),
                          sum(r[3] for r in defined) / len(defined),
                          sum(r[4] for r in defined) / len(defined)))

    study = ComparisonStudy(rows, mean_rows, oracle_infeasible)
    if out_dir is not None:
        study.path = Path(out_dir) / "comparison.csv"
        _write_csv(study.path, COMPARISON_HEADER, rows + mean_rows)
    return study

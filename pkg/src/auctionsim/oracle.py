"""Brute-force optimum and the bounds the auction is checked against."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .model import (Allocation, GainTensor, InterferenceSpec, PowerLevelTable,
                    check_feasibility, noise_power, sum_rate)
from .auction import AuctionParams

DEFAULT_LIMIT = 10_000_000


class InstanceTooLarge(Exception):
    """Search space exceeds the enumeration limit."""


class InfeasibleInstance(Exception):
    """No full assignment satisfies every per-RB interference threshold."""


@dataclass
class OracleResult:
    alloc: Allocation
    weighted_sum_rate: float     # nu1 * sum rate, re-evaluated via model.sum_rate
    feasible_count: int
    evaluated_count: int
    kernel: str


def exhaustive_optimum(gains: GainTensor, power: PowerLevelTable,
                       spec: InterferenceSpec, params: AuctionParams,
                       limit: int = DEFAULT_LIMIT,
                       kernel: str = None) -> OracleResult:
    """Enumerate every (RB, level)^K assignment and keep the best feasible one.

    Feasibility is the strict per-RB threshold rule; the objective is the
    nu1-weighted sum rate. Ties resolve to the lexicographically smallest
    assignment (transmitter-major). Instances with more than `limit`
    candidates are refused with InstanceTooLarge; instances with no
    feasible candidate raise InfeasibleInstance.
    """
    k_count = gains.transmitters
    resources = gains.rbs * power.count
    total = resources ** k_count
    if total > limit:
        raise InstanceTooLarge(
            f"{resources}^{k_count} = {total} candidates exceeds limit {limit}")

    fn = _kernels.get_kernel(kernel) if kernel else _kernels.enumerate_best
    # The compiled kernel takes C-contiguous views; tensors built from
    # slices or fancy indexing are normalized here, not by the caller.
    digits, _, feasible_count, evaluated = fn(
        np.ascontiguousarray(gains.direct), np.ascontiguousarray(gains.cross),
        np.ascontiguousarray(gains.mbs_to_receiver),
        np.ascontiguousarray(gains.ref_gain()), power.level_watts(),
        power.mbs_w_per_rb(), spec.thresholds_w(), noise_power(spec),
        params.nu1, spec.rb_bandwidth_hz, 0, total)
    if digits is None:
        raise InfeasibleInstance(
            f"none of the {total} assignments meets every threshold")

    alloc = Allocation.from_resource_ids(np.asarray(digits), power.count)
    report = check_feasibility(alloc, gains, power, spec)
    if not report.ok:  # guards against accumulated drift in kernel state
        raise RuntimeError(f"kernel returned an infeasible optimum: {report.violations}")
    value = params.nu1 * sum_rate(alloc, gains, power, spec)
    return OracleResult(alloc, value, feasible_count, evaluated,
                        kernel or _kernels.ACTIVE)


def k_epsilon_gap(oracle_value: float, auction_value: float, k_count: int,
                  params: AuctionParams) -> tuple:
    """(gap, within_bound): oracle minus auction weighted rate vs K*epsilon."""
    gap = oracle_value - auction_value
    return gap, gap <= k_count * params.epsilon


def iteration_bound(benefits, params: AuctionParams) -> tuple:
    """(max bids per resource, worst-case local updates).

    A resource's price rises by at least epsilon per bid round, and no
    agent bids once the price exceeds the benefit spread, so per-resource
    bids are capped by ceil((max B - min B) / epsilon). The second entry
    is the coarse total-work bound T * K * N * L with T = that cap.
    """
    benefits = np.asarray(benefits, dtype=float)
    if benefits.ndim != 3:
        raise ValueError("benefits must be a (K, N, L) table")
    k_count, n_count, l_count = benefits.shape
    spread = float(benefits.max() - benefits.min())
    cap = math.ceil(spread / params.epsilon)
    return cap, cap * k_count * n_count * l_count


def hill_climb(gains: GainTensor, power: PowerLevelTable, spec: InterferenceSpec,
               params: AuctionParams, rng: np.random.Generator,
               restarts: int = 8, max_moves: int = 500) -> OracleResult:
    """Random-restart local search for instances the enumerator refuses.

    Moves one transmitter at a time to its best feasible resource until no
    single move improves the weighted sum rate. Not an optimality oracle;
    kept out of all bound checks.
    """
    k_count = gains.transmitters
    resources = gains.rbs * power.count
    best_alloc, best_value, seen_feasible = None, -np.inf, 0
    for _ in range(restarts):
        ids = rng.integers(0, resources, size=k_count)
        alloc = Allocation.from_resource_ids(ids, power.count)
        for _ in range(max_moves):
            improved = False
            for k in range(k_count):
                current = alloc.resource_ids(power.count)[k]
                base_ok = check_feasibility(alloc, gains, power, spec).ok
                base = sum_rate(alloc, gains, power, spec) if base_ok else -np.inf
                choice, choice_value = current, base
                for r in range(resources):
                    if r == current:
                        continue
                    trial_ids = alloc.resource_ids(power.count).copy()
                    trial_ids[k] = r
                    trial = Allocation.from_resource_ids(trial_ids, power.count)
                    if not check_feasibility(trial, gains, power, spec).ok:
                        continue
                    value = sum_rate(trial, gains, power, spec)
                    if value > choice_value:
                        choice, choice_value = r, value
                if choice != current:
                    ids = alloc.resource_ids(power.count).copy()
                    ids[k] = choice
                    alloc = Allocation.from_resource_ids(ids, power.count)
                    improved = True
            if not improved:
                break
        if check_feasibility(alloc, gains, power, spec).ok:
            seen_feasible += 1
            value = params.nu1 * sum_rate(alloc, gains, power, spec)
            if value > best_value:
                best_alloc, best_value = alloc, value
    if best_alloc is None:
        raise InfeasibleInstance("hill climb found no feasible assignment")
    return OracleResult(best_alloc, best_value, seen_feasible, restarts, "hill-climb")

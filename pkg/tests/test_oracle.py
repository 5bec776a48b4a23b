"""Exhaustive oracle, checked against a from-scratch enumeration.

The reference enumerator below shares nothing with the package's
kernels: it walks itertools.product and reuses only the model-layer
feasibility and rate primitives, which have their own hand-value tests.
"""

import itertools

import numpy as np
import pytest

from auctionsim import (Allocation, AuctionParams, GainTensor,
                        InterferenceSpec, PowerLevelTable, check_feasibility,
                        run_auction, sum_rate)
from auctionsim._kernels import ACTIVE
from auctionsim.oracle import (InfeasibleInstance, InstanceTooLarge,
                               exhaustive_optimum, hill_climb, iteration_bound,
                               k_epsilon_gap)

from conftest import random_instance, small_power, small_spec

KERNELS = ("python",) if ACTIVE == "python" else ("python", "cython")


def reference_optimum(gains, power, spec, nu1=1.0):
    """First-maximum scan over assignments in lexicographic order."""
    resources = gains.rbs * power.count
    best_ids, best_value, feasible = None, -np.inf, 0
    for ids in itertools.product(range(resources), repeat=gains.transmitters):
        alloc = Allocation.from_resource_ids(np.array(ids), power.count)
        if not check_feasibility(alloc, gains, power, spec).ok:
            continue
        feasible += 1
        value = nu1 * sum_rate(alloc, gains, power, spec)
        if value > best_value:
            best_ids, best_value = ids, value
    return best_ids, best_value, feasible


@pytest.mark.parametrize("kernel", KERNELS)
@pytest.mark.parametrize("seed", [0, 1, 2, 7])
def test_matches_reference_enumeration(kernel, seed):
    gains = random_instance(np.random.default_rng(seed), k=3, m=2, n=2)
    power, spec = small_power(), small_spec()
    params = AuctionParams()
    ids, value, feasible = reference_optimum(gains, power, spec)
    result = exhaustive_optimum(gains, power, spec, params, kernel=kernel)
    assert result.alloc.resource_ids(power.count).tolist() == list(ids)
    assert result.weighted_sum_rate == pytest.approx(value, rel=1e-9)
    assert result.feasible_count == feasible
    assert result.evaluated_count == 4 ** 3
    assert result.kernel == kernel


def test_forced_level_choice():
    # One transmitter, one RB, two levels; the upper level alone breaks
    # the threshold (5e-8 * 10 mW = 5e-10 W >= 1e-10 W), so the oracle
    # must settle for the lower one.
    gains = GainTensor(np.full((1, 1), 1e-6), np.zeros((1, 1, 1)),
                       np.zeros((1, 1)), np.full((1, 1, 1), 5e-8))
    power = PowerLevelTable((0.0, 10.0), 20.0)
    spec = InterferenceSpec.uniform(-70.0, 1, -174.0, 180e3)
    result = exhaustive_optimum(gains, power, spec, AuctionParams())
    assert result.alloc.rb.tolist() == [0]
    assert result.alloc.level.tolist() == [0]
    assert result.feasible_count == 1
    assert result.evaluated_count == 2


def test_separable_instance_takes_private_argmax(rng):
    # No cross gains and huge thresholds decouple the transmitters, so
    # each lands on its best direct RB at the top power level.
    k, n = 4, 3
    direct = rng.uniform(0.1, 1.0, size=(k, n)) * 1e-7
    gains = GainTensor(direct, np.zeros((k, k, n)), np.zeros((k, n)),
                       np.full((k, 1, n), 1e-15))
    power = small_power(rbs=n)
    spec = small_spec(rbs=n, threshold_dbm=-10.0)
    result = exhaustive_optimum(gains, power, spec, AuctionParams(),
                                limit=10 ** 8)
    assert result.alloc.rb.tolist() == direct.argmax(axis=1).tolist()
    assert result.alloc.level.tolist() == [power.count - 1] * k


def test_rejects_oversized_instance(rng):
    gains = random_instance(rng, k=3)
    with pytest.raises(InstanceTooLarge, match="exceeds"):
        exhaustive_optimum(gains, small_power(), small_spec(), AuctionParams(),
                           limit=10)


def test_reports_infeasible_instance():
    # Even the quietest level of a single transmitter breaks the threshold.
    gains = GainTensor(np.full((1, 1), 1e-6), np.zeros((1, 1, 1)),
                       np.zeros((1, 1)), np.full((1, 1, 1), 1.0))
    power = PowerLevelTable((0.0,), 20.0)
    spec = InterferenceSpec.uniform(-70.0, 1, -174.0, 180e3)
    with pytest.raises(InfeasibleInstance):
        exhaustive_optimum(gains, power, spec, AuctionParams())


def test_relabeling_transmitters_preserves_optimum(rng):
    gains = random_instance(rng, k=3, m=2, n=2)
    power, spec = small_power(), small_spec()
    params = AuctionParams()
    base = exhaustive_optimum(gains, power, spec, params)
    perm = np.array([2, 0, 1])
    permuted = GainTensor(gains.direct[perm],
                          gains.cross[perm][:, perm],
                          gains.mbs_to_receiver[perm],
                          gains.tx_to_mue[perm])
    shuffled = exhaustive_optimum(permuted, power, spec, params)
    assert shuffled.weighted_sum_rate == pytest.approx(
        base.weighted_sum_rate, rel=1e-12)
    assert shuffled.alloc.rb.tolist() == base.alloc.rb[perm].tolist()
    assert shuffled.alloc.level.tolist() == base.alloc.level[perm].tolist()


def test_oracle_dominates_auction(params):
    checked = 0
    for seed in range(10):
        gains = random_instance(np.random.default_rng(seed), k=4, n=2)
        power, spec = small_power(), small_spec()
        auction = run_auction(gains, power, spec, params,
                              np.random.default_rng(seed))
        if not check_feasibility(auction.alloc, gains, power, spec).ok:
            continue
        oracle = exhaustive_optimum(gains, power, spec, params)
        achieved = params.nu1 * sum_rate(auction.alloc, gains, power, spec)
        assert oracle.weighted_sum_rate >= achieved - 1e-6
        gap, _ = k_epsilon_gap(oracle.weighted_sum_rate, achieved,
                               gains.transmitters, params)
        assert gap >= -1e-6
        checked += 1
    assert checked >= 5


# --------------------------------------------------------------------- bounds

def test_k_epsilon_gap_arithmetic():
    params = AuctionParams(epsilon=100.0)
    gap, ok = k_epsilon_gap(1000.0, 900.0, 3, params)
    assert gap == pytest.approx(100.0)
    assert ok
    gap, ok = k_epsilon_gap(1000.0, 500.0, 3, params)
    assert gap == pytest.approx(500.0)
    assert not ok
    _, ok = k_epsilon_gap(500.0, 1000.0, 3, params)
    assert ok


def test_iteration_bound_values():
    params = AuctionParams(epsilon=100.0)
    benefits = np.zeros((2, 3, 2))
    benefits[0, 0, 0] = 1000.0
    cap, work = iteration_bound(benefits, params)
    assert cap == 10
    assert work == 10 * 2 * 3 * 2
    cap, work = iteration_bound(np.full((1, 1, 1), 5.0), params)
    assert cap == 0 and work == 0
    cap, _ = iteration_bound(benefits * 1e-4, params)  # spread 0.1 < epsilon
    assert cap == 1
    with pytest.raises(ValueError, match="table"):
        iteration_bound(np.zeros((2, 2)), params)


def test_bid_counts_stay_under_bound(params):
    for seed in range(6):
        gains = random_instance(np.random.default_rng(seed), k=5, n=3)
        result = run_auction(gains, small_power(rbs=3), small_spec(rbs=3),
                             params, np.random.default_rng(seed + 50))
        low, high = result.trace.benefit_envelope()
        cap, _ = iteration_bound(np.array([low, high]).reshape(1, 1, 2), params)
        assert int(result.trace.bid_rounds.max()) <= cap


# ----------------------------------------------------------------- hill climb

def test_hill_climb_returns_feasible_near_optimum(rng, params):
    gains = random_instance(rng, k=3, m=2, n=2)
    power, spec = small_power(), small_spec()
    exact = exhaustive_optimum(gains, power, spec, params)
    climbed = hill_climb(gains, power, spec, params,
                         np.random.default_rng(0), restarts=6)
    assert check_feasibility(climbed.alloc, gains, power, spec).ok
    assert climbed.weighted_sum_rate <= exact.weighted_sum_rate + 1e-6
    assert climbed.kernel == "hill-climb"

"""Acceptance gate. One test per top-level criterion; each prints one
ACCEPTANCE line with the measured values it judged.

Criteria that the mechanism provably cannot meet on this instance family
are asserted at their stated tolerance anyway and fail with the measured
numbers on display; see the repository notes for the analysis. Nothing
here is tuned to pass.
"""

import math

import numpy as np
import pytest

from auctionsim import (AuctionParams, ExperimentPlan, InterferenceSpec,
                        PowerLevelTable, PropagationParams, ScenarioPoint,
                        SeedStreams, check_feasibility, empirical_cdf,
                        generate_topology, noise_power, path_loss_d2d,
                        path_loss_macro, path_loss_small, rate,
                        realize_link_budget, run_auction,
                        run_comparison_study, run_convergence_study, sum_rate)
from auctionsim.auction import equilibrium_check
from auctionsim.model import ScenarioDims
from auctionsim.oracle import exhaustive_optimum, iteration_bound
from auctionsim.units import watts_to_dbm

SEED = 1000
MUES, RBS, BAND = 6, 6, 1.08e6
FIG3_LEVELS = (3.0, 5.0)          # S=3, D=2, K=5
CONV_LEVELS = (3.0, 5.0, 7.0)     # convergence scenarios


def _line(name: str, ok: bool, detail: str) -> str:
    verdict = "PASS" if ok else "FAIL"
    message = f"ACCEPTANCE {name}: {verdict} [{detail}]"
    print(message)
    return message


def _instance(dims, levels):
    power = PowerLevelTable.from_mbs_total(levels, 43.0, dims.rbs)
    spec = InterferenceSpec.uniform(-70.0, dims.rbs, -174.0, BAND / dims.rbs)
    return power, spec


def _run_realization(dims, levels, realization, slot=0):
    power, spec = _instance(dims, levels)
    params = AuctionParams()
    streams = SeedStreams(SEED)
    prop = PropagationParams()
    topo = generate_topology(dims, prop, streams.topology(realization))
    budget = realize_link_budget(topo, dims, prop, streams.shadowing(realization))
    gains = budget.gains(streams.fading(realization, slot))
    result = run_auction(gains, power, spec, params,
                         streams.auction_init(realization, slot))
    return gains, power, spec, params, result


@pytest.fixture(scope="module")
def fig3_runs():
    """24 seeded realizations of the 5-transmitter comparison scenario,
    each with its exhaustive optimum."""
    dims = ScenarioDims(MUES, 3, 2, RBS, len(FIG3_LEVELS))
    runs = []
    for r in range(24):
        gains, power, spec, params, result = _run_realization(dims, FIG3_LEVELS, r)
        feasible = check_feasibility(result.alloc, gains, power, spec)
        oracle = exhaustive_optimum(gains, power, spec, params)
        achieved = params.nu1 * sum_rate(result.alloc, gains, power, spec)
        runs.append(dict(gains=gains, power=power, spec=spec, params=params,
                         result=result, feasible=feasible, oracle=oracle,
                         gap=oracle.weighted_sum_rate - achieved))
    return runs


@pytest.fixture(scope="module")
def convergence_runs():
    """100 realizations each of the 10- and 15-transmitter scenarios."""
    batches = {}
    for s, d in ((6, 4), (9, 6)):
        dims = ScenarioDims(MUES, s, d, RBS, len(CONV_LEVELS))
        batch = []
        for r in range(100):
            gains, power, spec, _, result = _run_realization(dims, CONV_LEVELS, r)
            batch.append(dict(gains=gains, power=power, spec=spec,
                              result=result))
        batches[(s, d)] = batch
    return batches


@pytest.fixture(scope="module")
def efficiency_study(tmp_path_factory):
    plan = ExperimentPlan(scenarios=(ScenarioPoint(3, 2, FIG3_LEVELS),),
                          realizations=50, slots=50, seed=SEED,
                          mues=MUES, rbs=RBS)
    out = tmp_path_factory.mktemp("efficiency")
    return run_comparison_study(plan, out_dir=out)


def test_primary_k_epsilon_optimality(fig3_runs):
    params = fig3_runs[0]["params"]
    bound = 5 * params.epsilon          # K = 5
    scored = [r for r in fig3_runs if r["result"].converged and r["feasible"].ok]
    within = [r for r in scored if r["gap"] <= bound]
    worst = max(r["gap"] for r in scored)
    detail = (f"{len(within)}/{len(scored)} converged feasible runs have "
              f"oracle-auction gap <= {bound:g} bps; worst gap "
              f"{worst:.1f} bps; {len(fig3_runs)} realizations")
    message = _line("k-epsilon-optimality", len(within) == len(scored), detail)
    assert len(scored) >= 20
    assert len(within) == len(scored), message


def test_primary_efficiency_band(efficiency_study):
    mean_eta = efficiency_study.mean_eta
    defined = sum(1 for r in efficiency_study.rows if not math.isnan(r[4]))
    ok = 0.70 <= mean_eta <= 0.95
    detail = (f"mean eta {mean_eta:.5f} over {defined} slot measurements "
              f"(band [0.70, 0.95]; {efficiency_study.oracle_infeasible} "
              f"oracle-infeasible slots excluded)")
    message = _line("efficiency-band", ok, detail)
    assert defined >= 50 * 50 - 50
    assert ok, message


def test_primary_convergence_speed(convergence_runs):
    stats = {}
    for (s, d), batch in convergence_runs.items():
        rounds = [r["result"].rounds if r["result"].converged else math.inf
                  for r in batch]
        stats[(s, d)] = empirical_cdf(rounds, 100)
    ok = stats[(6, 4)] >= 0.90 and stats[(9, 6)] >= 0.90
    detail = (f"within 100 rounds: S6-D4 {stats[(6, 4)]:.2f} of 100 runs, "
              f"S9-D6 CDF(100) = {stats[(9, 6)]:.2f}")
    message = _line("convergence-speed", ok, detail)
    assert ok, message


def test_primary_bid_count_bound(fig3_runs, convergence_runs):
    checked, violations, tightest = 0, 0, math.inf
    everything = list(fig3_runs)
    for batch in convergence_runs.values():
        everything.extend(batch)
    for run in everything:
        result = run["result"]
        low, high = result.trace.benefit_envelope()
        params = run.get("params", AuctionParams())
        cap, _ = iteration_bound(np.array([low, high]).reshape(1, 1, 2), params)
        worst = int(result.trace.bid_rounds.max())
        checked += 1
        tightest = min(tightest, cap - worst)
        if worst > cap:
            violations += 1
    detail = (f"{checked} runs, {violations} violations; smallest slack "
              f"(cap - observed) {tightest}")
    message = _line("bid-count-bound", violations == 0, detail)
    assert violations == 0, message


def test_primary_epsilon_complementary_slackness(fig3_runs):
    converged = [r for r in fig3_runs if r["result"].converged]
    reports = [equilibrium_check(r["result"].broadcast, r["gains"], r["power"],
                                 r["spec"], r["params"]) for r in converged]
    passing = sum(1 for rep in reports if rep.ok)
    worst = min(rep.worst for rep in reports)
    ok = passing == len(converged)
    detail = (f"{passing}/{len(converged)} converged runs satisfy every "
              f"agent's slack >= -epsilon; worst slack {worst:.1f}")
    message = _line("epsilon-complementary-slackness", ok, detail)
    assert ok, message


def test_primary_constraint_satisfaction(fig3_runs, convergence_runs):
    bad_auction, bad_oracle, converged = 0, 0, 0
    everything = list(fig3_runs)
    for batch in convergence_runs.values():
        everything.extend(batch)
    for run in everything:
        if not run["result"].converged:
            continue
        converged += 1
        report = check_feasibility(run["result"].alloc, run["gains"],
                                   run["power"], run["spec"])
        if not report.ok:
            bad_auction += 1
    for run in fig3_runs:
        report = check_feasibility(run["oracle"].alloc, run["gains"],
                                   run["power"], run["spec"])
        if not report.ok:
            bad_oracle += 1
    ok = bad_auction == 0 and bad_oracle == 0
    detail = (f"{converged} converged allocations, {bad_auction} infeasible; "
              f"{len(fig3_runs)} oracle optima, {bad_oracle} infeasible")
    message = _line("constraint-satisfaction", ok, detail)
    assert ok, message


def test_primary_formula_values():
    pl = (path_loss_small(30.0), path_loss_macro(300.0, 30.0),
          path_loss_d2d(15.0, 30.0))
    pl_ok = (abs(pl[0] - 68.00) <= 0.01 and abs(pl[1] - 144.38) <= 0.01
             and abs(pl[2] - 105.04) <= 0.01)
    spec = InterferenceSpec.uniform(-70.0, RBS, -174.0, 180e3)
    noise_dbm = watts_to_dbm(noise_power(spec))
    noise_ok = abs(noise_dbm - (-121.45)) <= 0.01
    rate_bps = rate(5.0, spec)
    rate_ok = abs(rate_bps - 465316.0) <= 1.0
    ok = pl_ok and noise_ok and rate_ok
    detail = (f"path loss {pl[0]:.2f}/{pl[1]:.2f}/{pl[2]:.2f} dB "
              f"(want 68.00/144.38/105.04 +-0.01, {'ok' if pl_ok else 'BAD'}); "
              f"noise {noise_dbm:.2f} dBm (want -121.45 +-0.01, "
              f"{'ok' if noise_ok else 'BAD'}); rate at SINR 5 "
              f"{rate_bps:.2f} bps (want 465316 +-1, {'ok' if rate_ok else 'BAD'}"
              f"; 180000*log2(6) = {180000 * math.log2(6):.2f})")
    message = _line("formula-values", ok, detail)
    assert ok, message


def test_primary_determinism(tmp_path):
    conv_plan = ExperimentPlan(scenarios=(ScenarioPoint(6, 4, CONV_LEVELS),),
                               realizations=15, slots=1, seed=SEED,
                               mues=MUES, rbs=RBS)
    cmp_plan = ExperimentPlan(scenarios=(ScenarioPoint(3, 2, FIG3_LEVELS),),
                              realizations=5, slots=5, seed=SEED,
                              mues=MUES, rbs=RBS)
    run_convergence_study(conv_plan, out_dir=tmp_path / "conv_a")
    run_convergence_study(conv_plan, out_dir=tmp_path / "conv_b", jobs=2)
    run_comparison_study(cmp_plan, out_dir=tmp_path / "cmp_a")
    run_comparison_study(cmp_plan, out_dir=tmp_path / "cmp_b", jobs=2)
    same = []
    for pair in (("conv_a", "conv_b"), ("cmp_a", "cmp_b")):
        for csv_path in sorted((tmp_path / pair[0]).glob("*.csv")):
            twin = tmp_path / pair[1] / csv_path.name
            same.append(csv_path.read_bytes() == twin.read_bytes())
    ok = all(same) and len(same) == 4
    detail = f"{sum(same)}/{len(same)} CSVs byte-identical across reruns"
    message = _line("determinism", ok, detail)
    assert ok, message

"""Distributed (RB, power level) auction.

Each underlay transmitter is an agent; resources are the N*L
(RB, level) pairs, flattened as r = rb * L + level. A coordinator (the
MBS) broadcasts, once per round, the full assignment, the per-RB
aggregated interference, the per-resource cost (the auction "price")
and the per-resource recorded highest bidder. All agents act
simultaneously against the same broadcast (Gauss-Jacobi style), then
the coordinator merges bids taking, per resource, the highest offered
cost, with simultaneous equal bids won by the lowest transmitter id.

An agent re-bids only while it is not the recorded highest bidder of
the resource it holds. It targets its utility argmax, where
utility = benefit - cost: benefit is the nu1-weighted Shannon rate the
resource would give against the broadcast allocation, cost is the
current price. Before moving it estimates the aggregated interference
the move would cause on the target RB and abandons the bid if the
estimate meets or exceeds the threshold. The estimate is deliberately
conservative: the agent's own current contribution is left inside the
broadcast interference term (set `exclude_self_interference` for the
corrected variant, which subtracts it when the agent already sits on
the target RB).

Costs start at zero, never decrease, and each successful bid raises the
winning resource's cost by at least epsilon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import (Allocation, GainTensor, InterferenceSpec, PowerLevelTable,
                    interference_per_rb, noise_power, rate, sinr, sum_rate)

NO_BIDDER = -1


@dataclass(frozen=True)
class AuctionParams:
    epsilon: float = 100.0
    nu1: float = 1.0
    nu2: float = 1.0
    t_max: int = 500
    cost_scale: float = 1e13
    convergence_window: int = 2
    exclude_self_interference: bool = False
    sequential: bool = False

    def __post_init__(self):
        if not (self.epsilon > 0.0 and math.isfinite(self.epsilon)):
            raise ValueError(f"auction.epsilon must be > 0, got {self.epsilon!r}")
        if self.nu1 < 0.0 or self.nu2 < 0.0:
            raise ValueError("auction.nu1 and auction.nu2 must be >= 0")
        if self.t_max < 1:
            raise ValueError("auction.t_max must be >= 1")
        if self.cost_scale <= 0.0:
            raise ValueError("auction.cost_scale must be > 0")
        if self.convergence_window < 2:
            raise ValueError("auction.convergence_window must be >= 2")


@dataclass
class AuctionBroadcast:
    """Coordinator state as seen by every agent at the start of a round."""

    alloc: Allocation
    interference_w: np.ndarray   # (N,) aggregated per RB
    cost: np.ndarray             # (N*L,)
    bidder: np.ndarray           # (N*L,) transmitter id or NO_BIDDER

    def copy(self) -> "AuctionBroadcast":
        return AuctionBroadcast(self.alloc.copy(), self.interference_w.copy(),
                                self.cost.copy(), self.bidder.copy())


@dataclass
class AgentState:
    """One agent's local cost/bidder view plus its current assignment."""

    agent: int
    assignment: int              # flattened resource id
    cost: np.ndarray
    bidder: np.ndarray


@dataclass
class LocalStepResult:
    assignment: int
    bid: bool
    raised_resource: int = None
    raised_value: float = None
    estimate_w: float = None     # interference estimate behind the decision


def benefit(k: int, n: int, l: int, broadcast: AuctionBroadcast, gains: GainTensor,
            power: PowerLevelTable, spec: InterferenceSpec,
            params: AuctionParams) -> float:
    """nu1-weighted rate transmitter k would get on (n, l) against the
    broadcast allocation (k's own current choice is ignored)."""
    return params.nu1 * rate(sinr(k, n, l, broadcast.alloc, gains, power, spec), spec)


def benefit_table(broadcast: AuctionBroadcast, gains: GainTensor,
                  power: PowerLevelTable, spec: InterferenceSpec,
                  params: AuctionParams) -> np.ndarray:
    """(K, N, L) benefits of every agent/resource pair against one broadcast.

    Vectorized equivalent of `benefit`; one table per round is shared by
    all local steps so every agent prices alternatives consistently.
    """
    k_count, n_count = gains.direct.shape
    level_w = power.level_watts()
    rb = broadcast.alloc.rb
    p_now = np.where(rb >= 0, level_w[np.where(rb >= 0, broadcast.alloc.level, 0)], 0.0)
    recv = np.zeros((k_count, n_count))
    for i in range(k_count):  # ascending, matching model.sinr's sum order
        if rb[i] >= 0:
            recv[:, rb[i]] += gains.cross[i, :, rb[i]] * p_now[i]
    denom = gains.mbs_to_receiver * power.mbs_w_per_rb() + recv + noise_power(spec)
    snr = gains.direct[:, :, None] * level_w[None, None, :] / denom[:, :, None]
    return params.nu1 * spec.rb_bandwidth_hz * np.log2(1.0 + snr)


def cost_of(k: int, n: int, l: int, broadcast: AuctionBroadcast, gains: GainTensor,
            power: PowerLevelTable, spec: InterferenceSpec,
            params: AuctionParams) -> float:
    """Clamped threshold-excess penalty of k using (n, l).

    Hypothetical aggregated interference on RB n (k at level l, all
    co-channel transmitters as broadcast) minus the threshold, clamped
    at zero, weighted by nu2, with the watt-scale excess multiplied by
    `cost_scale` to land in utility units.
    """
    ref = gains.ref_gain()
    hypothetical = ref[k, n] * power.level_w(l)
    for j in range(gains.transmitters):
        if j == k or broadcast.alloc.rb[j] != n:
            continue
        hypothetical += ref[j, n] * power.level_w(int(broadcast.alloc.level[j]))
    excess = hypothetical - spec.thresholds_w()[n]
    return max(0.0, params.nu2 * (params.cost_scale * excess))


def merge_cost_and_bidder(agent: AgentState, broadcast: AuctionBroadcast) -> AgentState:
    """Per-resource max of the agent's table and the broadcast table.

    The bidder follows whichever side attained the max; the broadcast
    wins ties, so a stale local view never outranks the coordinator.
    """
    take_broadcast = broadcast.cost >= agent.cost
    return AgentState(
        agent.agent,
        agent.assignment,
        np.where(take_broadcast, broadcast.cost, agent.cost),
        np.where(take_broadcast, broadcast.bidder, agent.bidder),
    )


def bid_increment(utilities: np.ndarray, chosen: int, params: AuctionParams) -> float:
    """Price raise for the chosen resource: (best - second best) + epsilon.

    `chosen` must attain the maximum utility. With a single resource
    there is no second best and the raise is epsilon alone.
    """
    utilities = np.asarray(utilities, dtype=float)
    if utilities.size == 1:
        return params.epsilon
    best = utilities.max()
    if utilities[chosen] < best:
        raise ValueError("chosen resource must attain the maximum utility")
    others = np.delete(utilities, chosen)
    return float(best - others.max() + params.epsilon)


def local_step(agent: AgentState, broadcast: AuctionBroadcast, gains: GainTensor,
               power: PowerLevelTable, spec: InterferenceSpec, params: AuctionParams,
               benefits: np.ndarray = None) -> tuple:
    """One agent's move against one broadcast.

    Returns (new AgentState, LocalStepResult). The agent merges the
    broadcast into its cost view, and re-bids only if the cost of the
    resource it holds did not drop (it never can) and someone else is
    the recorded bidder. The re-bid targets the utility argmax (lowest
    flattened resource id on ties); it goes through only if the
    interference estimate for the target RB stays strictly below the
    threshold, and then raises that resource's cost by `bid_increment`.
    """
    k = agent.agent
    levels = power.count
    merged = merge_cost_and_bidder(agent, broadcast)
    held = agent.assignment
    rose_or_stayed = merged.cost[held] >= agent.cost[held]  # inclusive, so a
    # freshly outbid agent re-enters even when the price is unchanged
    if not (rose_or_stayed and merged.bidder[held] != k):
        return merged, LocalStepResult(held, False)

    if benefits is None:
        benefits = np.array([[benefit(k, n, l, broadcast, gains, power, spec, params)
                              for l in range(levels)]
                             for n in range(gains.rbs)])
    utilities = benefits.reshape(-1) - merged.cost
    target = int(np.argmax(utilities))
    rb_t, level_t = target // levels, target % levels

    estimate = gains.ref_gain()[k, rb_t] * power.level_w(level_t) \
        + float(broadcast.interference_w[rb_t])
    if params.exclude_self_interference and broadcast.alloc.rb[k] == rb_t:
        estimate -= gains.ref_gain()[k, rb_t] \
            * power.level_w(int(broadcast.alloc.level[k]))
    if estimate >= spec.thresholds_w()[rb_t]:
        return merged, LocalStepResult(held, False, estimate_w=estimate)

    raised = float(merged.cost[target]) + bid_increment(utilities, target, params)
    state = AgentState(k, target, merged.cost.copy(), merged.bidder.copy())
    state.cost[target] = raised
    state.bidder[target] = k
    return state, LocalStepResult(target, True, target, raised, estimate)


@dataclass
class RoundRecord:
    round: int
    sum_rate_bps: float
    changed_agents: int
    max_cost: float
    raised_resources: tuple = ()
    benefit_min: float = math.nan
    benefit_max: float = math.nan


@dataclass
class RoundTrace:
    records: list = field(default_factory=list)
    bid_rounds: np.ndarray = None  # (N*L,) rounds in which the resource was raised

    def benefit_envelope(self) -> tuple:
        lows = [r.benefit_min for r in self.records if not math.isnan(r.benefit_min)]
        highs = [r.benefit_max for r in self.records if not math.isnan(r.benefit_max)]
        if not lows:
            raise ValueError("trace holds no benefit data")
        return min(lows), max(highs)


@dataclass
class AuctionResult:
    broadcast: AuctionBroadcast
    trace: RoundTrace
    converged: bool
    rounds: int          # rounds actually run; equals the convergence round when converged
    safety_ok: bool      # no reassignment ever moved onto an estimated violation

    @property
    def alloc(self) -> Allocation:
        return self.broadcast.alloc


def _initial_broadcast(gains: GainTensor, power: PowerLevelTable,
                       resources: int, rng: np.random.Generator) -> AuctionBroadcast:
    k = gains.transmitters
    ids = rng.integers(0, resources, size=k)
    alloc = Allocation.from_resource_ids(ids, power.count)
    return AuctionBroadcast(
        alloc,
        interference_per_rb(alloc, gains, power),
        np.zeros(resources),
        np.full(resources, NO_BIDDER, dtype=np.int64),
    )


def run_auction(gains: GainTensor, power: PowerLevelTable, spec: InterferenceSpec,
                params: AuctionParams, rng: np.random.Generator) -> AuctionResult:
    """Full auction: random start, synchronous rounds, convergence test.

    Round 0 assigns every agent a uniformly random resource with zero
    costs and no recorded bidders (its interference may well violate
    thresholds; the rounds are what clean that up). The loop stops once
    the assignment has stayed identical for `convergence_window`
    consecutive iterates, or at `t_max` rounds without that (converged
    False). With `sequential` set, one agent moves per round in id
    order instead of all at once; the window then counts full sweeps.
    """
    n_count = gains.rbs
    resources = n_count * power.count
    broadcast = _initial_broadcast(gains, power, resources, rng)
    agents = [AgentState(k, int(broadcast.alloc.resource_ids(power.count)[k]),
                         np.zeros(resources), np.full(resources, NO_BIDDER, dtype=np.int64))
              for k in range(gains.transmitters)]

    trace = RoundTrace(bid_rounds=np.zeros(resources, dtype=np.int64))
    trace.records.append(RoundRecord(0, sum_rate(broadcast.alloc, gains, power, spec),
                                     gains.transmitters, 0.0))

    window = params.convergence_window - 1  # unchanged transitions required
    if params.sequential:
        window = max(window, gains.transmitters)  # a full quiet sweep
    stable = 0
    converged = False
    safety_ok = True
    thresholds = spec.thresholds_w()
    rounds_run = 0

    for t in range(1, params.t_max + 1):
        rounds_run = t
        benefits = benefit_table(broadcast, gains, power, spec, params)
        movers = [(t - 1) % gains.transmitters] if params.sequential \
            else range(gains.transmitters)
        results = {}
        for k in movers:
            agents[k], results[k] = local_step(
                agents[k], broadcast, gains, power, spec, params,
                benefits=benefits[k])

        new_cost = broadcast.cost.copy()
        new_bidder = broadcast.bidder.copy()
        raised = []
        for k in sorted(results):  # ascending id: lowest id wins equal bids
            res = results[k]
            if res.bid and res.raised_value > new_cost[res.raised_resource]:
                new_cost[res.raised_resource] = res.raised_value
                new_bidder[res.raised_resource] = k
            if res.bid:
                raised.append(res.raised_resource)
                if res.estimate_w is not None and \
                        res.estimate_w >= thresholds[res.raised_resource // power.count]:
                    safety_ok = False

        ids = broadcast.alloc.resource_ids(power.count).copy()
        changed = 0
        for k, res in results.items():
            if res.assignment != ids[k]:
                changed += 1
            ids[k] = res.assignment
        alloc = Allocation.from_resource_ids(ids, power.count)
        broadcast = AuctionBroadcast(alloc, interference_per_rb(alloc, gains, power),
                                     new_cost, new_bidder)

        for r in sorted(set(raised)):
            trace.bid_rounds[r] += 1
        trace.records.append(RoundRecord(
            t, sum_rate(alloc, gains, power, spec), changed, float(new_cost.max()),
            tuple(sorted(set(raised))), float(benefits.min()), float(benefits.max())))

        stable = stable + 1 if changed == 0 else 0
        if stable >= window:
            converged = True
            break

    return AuctionResult(broadcast, trace, converged, rounds_run, safety_ok)


@dataclass
class SlackReport:
    """Per-agent equilibrium slack: held utility minus best utility."""

    slacks: np.ndarray
    epsilon: float

    @property
    def worst(self) -> float:
        return float(self.slacks.min())

    @property
    def ok(self) -> bool:
        return bool(np.all(self.slacks >= -self.epsilon))


def equilibrium_check(broadcast: AuctionBroadcast, gains: GainTensor,
                      power: PowerLevelTable, spec: InterferenceSpec,
                      params: AuctionParams) -> SlackReport:
    """Check that no agent could gain more than epsilon by switching,
    pricing every resource with the final cost table and benefits against
    the final allocation."""
    if not broadcast.alloc.fully_assigned():
        raise ValueError("equilibrium check requires a full assignment")
    benefits = benefit_table(broadcast, gains, power, spec, params)
    k_count = gains.transmitters
    utilities = benefits.reshape(k_count, -1) - broadcast.cost[None, :]
    ids = broadcast.alloc.resource_ids(power.count)
    held = utilities[np.arange(k_count), ids]
    return SlackReport(held - utilities.max(axis=1), params.epsilon)

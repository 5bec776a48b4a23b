"""Core problem model: SINR, rate, aggregated interference, feasibility.

The network has one macro base station (MBS) serving M macro users
(MUEs) on N resource blocks (RBs), plus K = S + D underlay transmitters
(S small-cell base stations, D device-to-device transmitters) that
reuse the same RBs. A full assignment gives every underlay transmitter
exactly one (RB, power level) pair. Underlay transmissions are admitted
only while the aggregated interference they put on each RB stays
strictly below a per-RB threshold, measured at that RB's most exposed
MUE (the "reference user").

All arithmetic here is in linear watts. Tie-breaking for every argmax
in this module: the lowest index wins.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .units import dbm_to_watts, watts_to_dbm

UNASSIGNED = -1


@dataclass(frozen=True)
class ScenarioDims:
    """Problem sizes. K (underlay transmitter count) is always S + D."""

    mues: int
    small_cells: int
    d2d_pairs: int
    rbs: int
    levels: int

    def __post_init__(self):
        for name in ("mues", "small_cells", "d2d_pairs", "rbs", "levels"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise ValueError(f"dims.{name} must be an integer >= 1, got {value!r}")

    @property
    def transmitters(self) -> int:
        return self.small_cells + self.d2d_pairs

    @property
    def resources(self) -> int:
        return self.rbs * self.levels


@dataclass(frozen=True)
class PowerLevelTable:
    """Discrete transmit power levels plus the MBS per-RB power.

    Levels are stored in dBm, strictly increasing; `level_watts`
    converts once to linear. The MBS budget is usually given as a total
    over the band and split evenly across RBs in linear watts.
    """

    levels_dbm: tuple
    mbs_dbm_per_rb: float

    def __post_init__(self):
        levels = tuple(float(v) for v in self.levels_dbm)
        if not levels:
            raise ValueError("power.levels_dbm must not be empty")
        if any(not math.isfinite(v) for v in levels):
            raise ValueError("power.levels_dbm must be finite")
        if any(b <= a for a, b in zip(levels, levels[1:])):
            raise ValueError(f"power.levels_dbm must be strictly increasing, got {levels}")
        if not math.isfinite(self.mbs_dbm_per_rb):
            raise ValueError("power.mbs_dbm_per_rb must be finite")
        object.__setattr__(self, "levels_dbm", levels)

    @classmethod
    def from_mbs_total(cls, levels_dbm, mbs_total_dbm: float, rbs: int,
                       mbs_dbm_per_rb=None) -> "PowerLevelTable":
        """Split a total MBS budget evenly across `rbs` RBs (linear watts),
        unless an explicit per-RB value overrides it."""
        if mbs_dbm_per_rb is None:
            mbs_dbm_per_rb = watts_to_dbm(dbm_to_watts(mbs_total_dbm) / rbs)
        return cls(tuple(levels_dbm), float(mbs_dbm_per_rb))

    @property
    def count(self) -> int:
        return len(self.levels_dbm)

    def level_watts(self) -> np.ndarray:
        return np.array([dbm_to_watts(v) for v in self.levels_dbm])

    def level_w(self, l: int) -> float:
        return dbm_to_watts(self.levels_dbm[l])

    def mbs_w_per_rb(self) -> float:
        return dbm_to_watts(self.mbs_dbm_per_rb)


@dataclass(frozen=True)
class InterferenceSpec:
    """Per-RB interference thresholds and the noise model.

    sigma^2 = noise PSD integrated over one RB bandwidth; thresholds are
    strict upper bounds on aggregated underlay interference per RB.
    """

    thresholds_dbm: tuple
    noise_psd_dbm_hz: float
    rb_bandwidth_hz: float

    def __post_init__(self):
        thresholds = tuple(float(v) for v in self.thresholds_dbm)
        if not thresholds or any(not math.isfinite(v) for v in thresholds):
            raise ValueError("interference.thresholds_dbm must be non-empty and finite")
        if not (self.rb_bandwidth_hz > 0.0 and math.isfinite(self.rb_bandwidth_hz)):
            raise ValueError(
                f"interference.rb_bandwidth_hz must be > 0, got {self.rb_bandwidth_hz!r}")
        if not math.isfinite(self.noise_psd_dbm_hz):
            raise ValueError("interference.noise_psd_dbm_hz must be finite")
        object.__setattr__(self, "thresholds_dbm", thresholds)

    @classmethod
    def uniform(cls, threshold_dbm: float, rbs: int, noise_psd_dbm_hz: float,
                rb_bandwidth_hz: float) -> "InterferenceSpec":
        return cls((float(threshold_dbm),) * rbs, noise_psd_dbm_hz, rb_bandwidth_hz)

    @property
    def rbs(self) -> int:
        return len(self.thresholds_dbm)

    def thresholds_w(self) -> np.ndarray:
        return np.array([dbm_to_watts(v) for v in self.thresholds_dbm])


def noise_power(spec: InterferenceSpec) -> float:
    """Thermal noise power per RB in watts (PSD integrated over one RB)."""
    return dbm_to_watts(spec.noise_psd_dbm_hz) * spec.rb_bandwidth_hz


@dataclass
class GainTensor:
    """Linear channel power gains for one fading draw.

    direct[k, n]      transmitter k -> its own receiver on RB n
    cross[i, j, n]    transmitter i -> receiver of transmitter j (i != j);
                      the diagonal is fixed at zero so full-axis sums
                      already exclude self-interference
    mbs_to_receiver[k, n]   MBS -> receiver of transmitter k
    tx_to_mue[k, m, n]      transmitter k -> MUE m
    """

    direct: np.ndarray
    cross: np.ndarray
    mbs_to_receiver: np.ndarray
    tx_to_mue: np.ndarray
    _ref_gain: np.ndarray = field(default=None, repr=False)
    _ref_user: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        self.direct = np.asarray(self.direct, dtype=float)
        self.cross = np.asarray(self.cross, dtype=float)
        self.mbs_to_receiver = np.asarray(self.mbs_to_receiver, dtype=float)
        self.tx_to_mue = np.asarray(self.tx_to_mue, dtype=float)
        k, n = self.direct.shape
        if self.cross.shape != (k, k, n):
            raise ValueError(f"cross must have shape {(k, k, n)}, got {self.cross.shape}")
        if self.mbs_to_receiver.shape != (k, n):
            raise ValueError("mbs_to_receiver must match direct's shape")
        if self.tx_to_mue.ndim != 3 or self.tx_to_mue.shape[0] != k or self.tx_to_mue.shape[2] != n:
            raise ValueError(f"tx_to_mue must have shape ({k}, M, {n})")
        for name in ("direct", "cross", "mbs_to_receiver", "tx_to_mue"):
            arr = getattr(self, name)
            if not np.all(np.isfinite(arr)) or np.any(arr < 0.0):
                raise ValueError(f"gains.{name} must be finite and non-negative")
        if np.any(np.einsum("iin->in", self.cross) != 0.0):
            raise ValueError("gains.cross diagonal must be zero")

    @property
    def transmitters(self) -> int:
        return self.direct.shape[0]

    @property
    def mues(self) -> int:
        return self.tx_to_mue.shape[1]

    @property
    def rbs(self) -> int:
        return self.direct.shape[1]

    def ref_gain(self) -> np.ndarray:
        """(K, N) gain from each transmitter to its reference user per RB."""
        if self._ref_gain is None:
            self._ref_gain = self.tx_to_mue.max(axis=1)
        return self._ref_gain

    def ref_user(self) -> np.ndarray:
        """(K, N) index of the strongest-gain MUE per transmitter and RB."""
        if self._ref_user is None:
            self._ref_user = self.tx_to_mue.argmax(axis=1)
        return self._ref_user


def reference_user(k: int, n: int, gains: GainTensor) -> int:
    """MUE that observes transmitter k strongest on RB n (lowest index on ties)."""
    return int(np.argmax(gains.tx_to_mue[k, :, n]))


class Allocation:
    """Per-transmitter (RB, power level) choice; -1 marks unassigned.

    The representation stores at most one resource per transmitter, so
    the one-choice constraint holds by construction; "exactly one" is
    what `check_feasibility` verifies for a full assignment.
    """

    __slots__ = ("rb", "level")

    def __init__(self, rb, level):
        self.rb = np.asarray(rb, dtype=np.int64).copy()
        self.level = np.asarray(level, dtype=np.int64).copy()
        if self.rb.shape != self.level.shape or self.rb.ndim != 1:
            raise ValueError("rb and level must be 1-D arrays of equal length")
        if np.any((self.rb == UNASSIGNED) != (self.level == UNASSIGNED)):
            raise ValueError("rb and level must be unassigned together")

    @classmethod
    def unassigned(cls, transmitters: int) -> "Allocation":
        return cls(np.full(transmitters, UNASSIGNED), np.full(transmitters, UNASSIGNED))

    @classmethod
    def from_pairs(cls, pairs) -> "Allocation":
        rb = [UNASSIGNED if p is None else p[0] for p in pairs]
        level = [UNASSIGNED if p is None else p[1] for p in pairs]
        return cls(rb, level)

    @classmethod
    def from_resource_ids(cls, ids, levels: int) -> "Allocation":
        ids = np.asarray(ids, dtype=np.int64)
        rb = np.where(ids == UNASSIGNED, UNASSIGNED, ids // levels)
        level = np.where(ids == UNASSIGNED, UNASSIGNED, ids % levels)
        return cls(rb, level)

    def resource_ids(self, levels: int) -> np.ndarray:
        return np.where(self.rb == UNASSIGNED, UNASSIGNED, self.rb * levels + self.level)

    @property
    def transmitters(self) -> int:
        return self.rb.shape[0]

    def assigned_mask(self) -> np.ndarray:
        return self.rb != UNASSIGNED

    def fully_assigned(self) -> bool:
        return bool(np.all(self.rb != UNASSIGNED))

    def copy(self) -> "Allocation":
        return Allocation(self.rb, self.level)

    def pairs(self):
        return [None if r == UNASSIGNED else (int(r), int(l))
                for r, l in zip(self.rb, self.level)]

    def __eq__(self, other):
        if not isinstance(other, Allocation):
            return NotImplemented
        return bool(np.array_equal(self.rb, other.rb) and np.array_equal(self.level, other.level))

    def __repr__(self):
        return f"Allocation({self.pairs()})"


def sinr(k: int, n: int, l: int, alloc: Allocation, gains: GainTensor,
         power: PowerLevelTable, spec: InterferenceSpec) -> float:
    """SINR at transmitter k's receiver if k sends on RB n at level l.

    `alloc` supplies the co-channel choices of the other transmitters;
    k's own entry in it is ignored. Denominator: MBS interference on RB
    n, plus co-channel underlay interference, plus noise.
    """
    numerator = gains.direct[k, n] * power.level_w(l)
    interference = 0.0
    for j in range(gains.transmitters):
        if j == k or alloc.rb[j] != n:
            continue
        interference += gains.cross[j, k, n] * power.level_w(int(alloc.level[j]))
    denominator = gains.mbs_to_receiver[k, n] * power.mbs_w_per_rb() + interference \
        + noise_power(spec)
    return numerator / denominator


def rate(sinr_value: float, spec: InterferenceSpec) -> float:
    """Shannon rate in bit/s over one RB bandwidth."""
    if sinr_value < 0.0:
        raise ValueError(f"SINR must be non-negative, got {sinr_value!r}")
    return spec.rb_bandwidth_hz * math.log2(1.0 + sinr_value)


def aggregated_interference(n: int, alloc: Allocation, gains: GainTensor,
                            power: PowerLevelTable) -> float:
    """Total underlay interference on RB n, measured at each transmitter's
    reference user (watts)."""
    ref = gains.ref_gain()
    total = 0.0
    for k in range(gains.transmitters):
        if alloc.rb[k] != n:
            continue
        total += ref[k, n] * power.level_w(int(alloc.level[k]))
    return total


def interference_per_rb(alloc: Allocation, gains: GainTensor,
                        power: PowerLevelTable) -> np.ndarray:
    return np.array([aggregated_interference(n, alloc, gains, power)
                     for n in range(gains.rbs)])


def sum_rate(alloc: Allocation, gains: GainTensor, power: PowerLevelTable,
             spec: InterferenceSpec) -> float:
    """Total underlay rate of a full assignment in bit/s.

    This is the canonical objective evaluation; the exhaustive solver
    reports its optimum through this same function.
    """
    if not alloc.fully_assigned():
        raise ValueError("sum_rate requires every transmitter to be assigned")
    total = 0.0
    for k in range(gains.transmitters):
        total += rate(sinr(k, int(alloc.rb[k]), int(alloc.level[k]), alloc,
                           gains, power, spec), spec)
    return total


@dataclass
class FeasibilityReport:
    rb_interference_w: np.ndarray
    rb_thresholds_w: np.ndarray
    rb_ok: np.ndarray
    one_hot_ok: np.ndarray
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations


def check_feasibility(alloc: Allocation, gains: GainTensor, power: PowerLevelTable,
                      spec: InterferenceSpec) -> FeasibilityReport:
    """Verify the two assignment constraints.

    Per RB: aggregated interference strictly below the threshold
    (equality counts as a violation). Per transmitter: exactly one
    (RB, level) pair chosen.
    """
    if spec.rbs != gains.rbs:
        raise ValueError("spec and gains disagree on RB count")
    interference = interference_per_rb(alloc, gains, power)
    thresholds = spec.thresholds_w()
    rb_ok = interference < thresholds
    one_hot_ok = alloc.assigned_mask()
    violations = []
    for n in np.flatnonzero(~rb_ok):
        violations.append(
            f"rb_interference[{n}]: {interference[n]:.6e} W >= threshold "
            f"{thresholds[n]:.6e} W")
    for k in np.flatnonzero(~one_hot_ok):
        violations.append(f"one_hot[k={k}]: transmitter has no (rb, level) assigned")
    return FeasibilityReport(interference, thresholds, rb_ok, one_hot_ok, violations)

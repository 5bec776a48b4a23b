"""Topology generation and link-gain realization.

Three deterministic path-loss classes cover every link, selected by the
originating node and by whether the link leaves the small cell's
building:

    small  38.46 + 20 log10(d)              SBS -> its own SUE and other
                                            underlay receivers
    small  38.46 + 20 log10(d) + wall       SBS -> MUE victim links; the
                                            indoor signal pays the outdoor
                                            wall loss on its way to the
                                            macro user
    macro  15.3 + 40 log10(d) + wall        MBS -> anything, and D2D
                                            transmitter -> any receiver that
                                            is not its own (SUEs, other D2D
                                            receivers, MUEs)
    d2d    148 + 40 log10(0.001 d) + wall   D2D transmitter -> its own receiver

On top of the deterministic loss each link gets one log-normal
shadowing draw (held constant across RBs) and each (link, RB) gets an
independent unit-mean exponential fast-fading power draw that
multiplies the linear gain:

    gain = 10^(-(pathloss_dB + shadow_dB) / 10) * fading

Shadowing standard deviation is 8 dB for macro- and d2d-class links and
4 dB for small-class links.

Randomness is split into named substreams derived from one master seed
so that, e.g., redrawing fading for a new time slot never disturbs the
topology or shadowing of the same realization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import GainTensor, ScenarioDims

STREAM_TOPOLOGY = 0
STREAM_SHADOWING = 1
STREAM_FADING = 2
STREAM_AUCTION = 3

_MAX_ANGLE_TRIES = 10_000


@dataclass(frozen=True)
class PropagationParams:
    shadow_std_macro_d2d_db: float = 8.0
    shadow_std_small_db: float = 4.0
    wall_loss_db: float = 30.0
    area_side_m: float = 300.0
    macro_radius_m: float = 300.0
    small_radius_m: float = 30.0
    d2d_pair_distance_m: float = 15.0
    # Standard drop hygiene: no underlay transmitter (SBS or D2D) is
    # placed on top of a macro user. Zero disables the separation.
    min_mue_separation_m: float = 20.0
    rayleigh_fading: bool = True

    def __post_init__(self):
        if self.shadow_std_macro_d2d_db < 0.0 or self.shadow_std_small_db < 0.0:
            raise ValueError("propagation shadow standard deviations must be >= 0")
        if self.wall_loss_db < 0.0:
            raise ValueError("propagation.wall_loss_db must be >= 0")
        for name in ("area_side_m", "macro_radius_m", "small_radius_m",
                     "d2d_pair_distance_m"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"propagation.{name} must be > 0")
        if self.min_mue_separation_m < 0.0:
            raise ValueError("propagation.min_mue_separation_m must be >= 0")
        if self.small_radius_m >= self.macro_radius_m:
            raise ValueError("propagation.small_radius_m must be below macro_radius_m")


def path_loss_small(distance_m) -> float:
    """Small-cell class deterministic path loss in dB."""
    distance_m = np.asarray(distance_m, dtype=float)
    if np.any(distance_m <= 0.0):
        raise ValueError("distance must be > 0 m")
    return 38.46 + 20.0 * np.log10(distance_m)


def path_loss_macro(distance_m, wall_loss_db: float) -> float:
    """Macro class deterministic path loss in dB, wall loss included."""
    distance_m = np.asarray(distance_m, dtype=float)
    if np.any(distance_m <= 0.0):
        raise ValueError("distance must be > 0 m")
    return 15.3 + 40.0 * np.log10(distance_m) + wall_loss_db

def path_loss_d2d(distance_m, wall_loss_db: float) -> float:
    """D2D direct-link deterministic path loss in dB (distance in km inside
    the log term), wall loss included."""
    distance_m = np.asarray(distance_m, dtype=float)
    if np.any(distance_m <= 0.0):
        raise ValueError("distance must be > 0 m")
    return 148.0 + 40.0 * np.log10(0.001 * distance_m) + wall_loss_db


class SeedStreams:
    """Named, independent RNG substreams derived from one master seed."""

    def __init__(self, seed: int):
        self.seed = int(seed)

    def _rng(self, *path) -> np.random.Generator:
        entropy = self.seed & 0xFFFF_FFFF_FFFF_FFFF
        key = tuple(int(p) for p in path)
        if any(p < 0 for p in key):
            raise ValueError("substream path components must be non-negative")
        return np.random.default_rng(np.random.SeedSequence(entropy, spawn_key=key))

    def topology(self, realization: int) -> np.random.Generator:
        return self._rng(STREAM_TOPOLOGY, realization)

    def shadowing(self, realization: int) -> np.random.Generator:
        return self._rng(STREAM_SHADOWING, realization)

    def fading(self, realization: int, slot: int = 0) -> np.random.Generator:
        return self._rng(STREAM_FADING, realization, slot)

    def auction_init(self, realization: int, slot: int = 0) -> np.random.Generator:
        return self._rng(STREAM_AUCTION, realization, slot)


@dataclass
class Topology:
    """Node positions in metres; MBS pinned to the area centre."""

    mbs: np.ndarray
    mues: np.ndarray
    sbs: np.ndarray
    sues: np.ndarray
    d2d_tx: np.ndarray
    d2d_rx: np.ndarray

    @property
    def small_cells(self) -> int:
        return self.sbs.shape[0]

    @property
    def d2d_pairs(self) -> int:
        return self.d2d_tx.shape[0]

    @property
    def mue_count(self) -> int:
        return self.mues.shape[0]

    def tx_positions(self) -> np.ndarray:
        """Underlay transmitter positions, SBS block first then D2D."""
        return np.vstack([self.sbs, self.d2d_tx])

    def rx_positions(self) -> np.ndarray:
        """Matching underlay receiver positions (SUEs, then D2D receivers)."""
        return np.vstack([self.sues, self.d2d_rx])


def _inside(point: np.ndarray, side: float) -> bool:
    return 0.0 <= point[0] <= side and 0.0 <= point[1] <= side


def _offset_at_radius(anchor: np.ndarray, radius: float, side: float,
                      rng: np.random.Generator) -> np.ndarray:
    # Resample only the angle so the radius distribution stays exact even
    # when the anchor sits near the area boundary.
    for _ in range(_MAX_ANGLE_TRIES):
        theta = rng.uniform(0.0, 2.0 * math.pi)
        point = anchor + radius * np.array([math.cos(theta), math.sin(theta)])
        if _inside(point, side):
            return point
    raise RuntimeError("could not place node inside the area; anchor outside bounds?")


def generate_topology(dims: ScenarioDims, params: PropagationParams,
                      rng: np.random.Generator) -> Topology:
    """Draw one spatial realization.

    MUEs are uniform over the square area. SBSs and D2D transmitters
    are uniform as well, except that draws landing within
    `min_mue_separation_m` of an MUE are redrawn. Each SUE is uniform
    on a disk of `small_radius_m` around its SBS, each D2D receiver at
    exactly `d2d_pair_distance_m` from its transmitter. Placement order
    is fixed (MUEs, SBSs, SUEs, D2D transmitters, D2D receivers) so a
    given rng state always yields the same layout.
    """
    side = params.area_side_m
    mbs = np.array([side / 2.0, side / 2.0])
    mues = rng.uniform(0.0, side, size=(dims.mues, 2))

    def draw_away_from_mues(what: str) -> np.ndarray:
        # Redraw positions that land within the MUE separation so a
        # macro user never sits in an underlay transmitter's near field.
        for _ in range(_MAX_ANGLE_TRIES):
            candidate = rng.uniform(0.0, side, size=2)
            if (dims.mues == 0 or params.min_mue_separation_m == 0.0
                    or np.min(np.linalg.norm(mues - candidate[None, :], axis=1))
                    >= params.min_mue_separation_m):
                return candidate
        raise RuntimeError(f"could not place {what} away from every MUE")

    sbs = np.empty((dims.small_cells, 2))
    for i in range(dims.small_cells):
        sbs[i] = draw_away_from_mues("an SBS")
    sues = np.empty_like(sbs)
    for i in range(dims.small_cells):
        u = rng.uniform()
        while u == 0.0:  # keep SUE strictly off its SBS position
            u = rng.uniform()
        sues[i] = _offset_at_radius(sbs[i], params.small_radius_m * math.sqrt(u),
                                    side, rng)
    d2d_tx = np.empty((dims.d2d_pairs, 2))
    for i in range(dims.d2d_pairs):
        d2d_tx[i] = draw_away_from_mues("a D2D transmitter")
    d2d_rx = np.empty_like(d2d_tx)
    for i in range(dims.d2d_pairs):
        d2d_rx[i] = _offset_at_radius(d2d_tx[i], params.d2d_pair_distance_m,
                                      side, rng)
    return Topology(mbs, mues, sbs, sues, d2d_tx, d2d_rx)


def _distances(points_a: np.ndarray, points_b: np.ndarray) -> np.ndarray:
    diff = points_a[:, None, :] - points_b[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=-1))


PATH_SMALL = "small"
PATH_MACRO = "macro"
PATH_D2D = "d2d"


@dataclass
class LinkBudget:
    """Deterministic path loss plus frozen shadowing for one realization.

    Holding these fixed while redrawing only fading is what a "time
    slot" means in the experiment harnesses. Arrays follow the
    GainTensor layout but store dB losses.
    """

    loss_direct_db: np.ndarray
    loss_cross_db: np.ndarray
    loss_mbs_db: np.ndarray
    loss_to_mue_db: np.ndarray
    rbs: int
    rayleigh_fading: bool

    def gains(self, fading_rng: np.random.Generator) -> GainTensor:
        """Apply one fast-fading draw (per link and RB) and return linear gains."""
        k, m = self.loss_to_mue_db.shape[0], self.loss_to_mue_db.shape[1]
        direct = _fade(self.loss_direct_db[:, None], (k, self.rbs), fading_rng,
                       self.rayleigh_fading)
        cross = _fade(self.loss_cross_db[:, :, None], (k, k, self.rbs), fading_rng,
                      self.rayleigh_fading)
        # Diagonal carries +inf loss; force the gain diagonal to exact zero.
        cross[np.arange(k), np.arange(k), :] = 0.0
        mbs = _fade(self.loss_mbs_db[:, None], (k, self.rbs), fading_rng,
                    self.rayleigh_fading)
        to_mue = _fade(self.loss_to_mue_db[:, :, None], (k, m, self.rbs), fading_rng,
                       self.rayleigh_fading)
        return GainTensor(direct, cross, mbs, to_mue)


def shadowing_db(rng: np.random.Generator, std_db: float, size) -> np.ndarray:
    return rng.normal(0.0, std_db, size=size)


def rayleigh_power(rng: np.random.Generator, size) -> np.ndarray:
    """Unit-mean exponential power draws for Rayleigh fast fading."""
    return rng.exponential(1.0, size=size)


def _fade(loss_db, shape, rng: np.random.Generator, rayleigh: bool) -> np.ndarray:
    # fading draw is a unit-mean power gain and so multiplies the linear
    # gain; a draw below 1 is a fade, never an amplification of the mean.
    fading = rayleigh_power(rng, shape) if rayleigh else np.ones(shape)
    return 10.0 ** (-loss_db / 10.0) * fading


def realize_link_budget(topology: Topology, dims: ScenarioDims,
                        params: PropagationParams,
                        shadow_rng: np.random.Generator) -> LinkBudget:
    """Path loss by link class plus one shadowing draw per link."""
    s, d, m = dims.small_cells, dims.d2d_pairs, dims.mues
    k = s + d
    tx = topology.tx_positions()
    rx = topology.rx_positions()
    wall = params.wall_loss_db
    is_sbs = np.arange(k) < s

    # Deterministic losses. Direct links: SBS->SUE small class, D2D pair d2d class.
    d_direct = np.linalg.norm(tx - rx, axis=1)
    loss_direct = np.where(is_sbs, path_loss_small(d_direct),
                           path_loss_d2d(d_direct, wall))

    # Cross links tx i -> rx j: small class when i is an SBS, macro otherwise.
    d_cross = _distances(tx, rx)
    np.fill_diagonal(d_cross, 1.0)  # placeholder; diagonal never used
    loss_cross = np.where(is_sbs[:, None], path_loss_small(d_cross),
                          path_loss_macro(d_cross, wall))

    d_mbs = np.linalg.norm(rx - topology.mbs[None, :], axis=1)
    loss_mbs = path_loss_macro(d_mbs, wall)

    # SBS-to-MUE victim links keep the small-cell slope but cross the
    # building envelope, so they carry the outdoor wall loss on top.
    d_mue = _distances(tx, topology.mues)
    loss_to_mue = np.where(is_sbs[:, None], path_loss_small(d_mue) + wall,
                           path_loss_macro(d_mue, wall))

    # One shadowing draw per link, standard deviation set by the link class.
    # Draw order is fixed: direct, cross (row major), MBS, to-MUE.
    std_small = params.shadow_std_small_db
    std_macro = params.shadow_std_macro_d2d_db
    loss_direct = loss_direct + shadowing_db(
        shadow_rng, 1.0, k) * np.where(is_sbs, std_small, std_macro)
    loss_cross = loss_cross + shadowing_db(
        shadow_rng, 1.0, (k, k)) * np.where(is_sbs[:, None], std_small, std_macro)
    loss_mbs = loss_mbs + shadowing_db(shadow_rng, std_macro, k)
    loss_to_mue = loss_to_mue + shadowing_db(
        shadow_rng, 1.0, (k, m)) * np.where(is_sbs[:, None], std_small, std_macro)

    np.fill_diagonal(loss_cross, np.inf)  # no self link
    return LinkBudget(loss_direct, loss_cross, loss_mbs, loss_to_mue,
                      dims.rbs, params.rayleigh_fading)


def realize_gains(topology: Topology, dims: ScenarioDims, params: PropagationParams,
                  shadow_rng: np.random.Generator,
                  fading_rng: np.random.Generator) -> GainTensor:
    """One-shot convenience: link budget plus a single fading draw."""
    return realize_link_budget(topology, dims, params, shadow_rng).gains(fading_rng)

"""JSON configuration: defaults, validation, effective-config echo.

A config file may set any subset of the documented fields; everything
omitted falls back to the standard parameter table (6 MUEs, 6 RBs over
1.08 MHz, -70 dBm interference threshold, -174 dBm/Hz noise, 43 dBm MBS
power split evenly across RBs, epsilon 100, 300 m area, 30 m small-cell
radius, 15 m D2D pair distance, 8/4 dB shadowing, 30 dB wall loss,
power levels {3, 5} dBm). Validation failures always name the offending
field by its dotted path. Unknown fields are rejected rather than
ignored, so a typo cannot silently run the defaults.

The parsed bundle echoes back as a plain dict (`effective()`) that is
itself a valid config file reproducing the exact run.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass
from pathlib import Path

from .auction import AuctionParams
from .channel import PropagationParams
from .experiments import ExperimentPlan, ScenarioPoint
from .model import InterferenceSpec, PowerLevelTable, ScenarioDims


class ConfigError(ValueError):
    """Bad config content; the message starts with the field path."""


_DEFAULTS = {
    "dims": {"mues": 6, "small_cells": 3, "d2d_pairs": 2, "rbs": 6},
    "power": {"levels_dbm": [3.0, 5.0], "mbs_total_dbm": 43.0},
    "interference": {"threshold_dbm": -70.0, "noise_psd_dbm_hz": -174.0,
                     "bandwidth_hz": 1.08e6},
    "auction": {"epsilon": 100.0, "nu1": 1.0, "nu2": 1.0, "t_max": 500,
                "cost_scale": 1e13, "convergence_window": 2,
                "exclude_self_interference": False, "sequential": False},
    "propagation": {"shadow_std_macro_d2d_db": 8.0, "shadow_std_small_db": 4.0,
                    "wall_loss_db": 30.0, "area_side_m": 300.0,
                    "macro_radius_m": 300.0, "small_radius_m": 30.0,
                    "d2d_pair_distance_m": 15.0, "min_mue_separation_m": 20.0,
                    "rayleigh_fading": True},
    "plan": {"realizations": 50, "slots": 50, "seed": 0, "scenarios": None},
}

_INT_FIELDS = {
    ("dims", "mues"), ("dims", "small_cells"), ("dims", "d2d_pairs"),
    ("dims", "rbs"), ("auction", "t_max"), ("auction", "convergence_window"),
    ("plan", "realizations"), ("plan", "slots"), ("plan", "seed"),
}
_BOOL_FIELDS = {
    ("auction", "exclude_self_interference"), ("auction", "sequential"),
    ("propagation", "rayleigh_fading"),
}


def _check_scalar(path: str, section: str, key: str, value):
    if (section, key) in _BOOL_FIELDS:
        if not isinstance(value, bool):
            raise ConfigError(f"{path}: expected a boolean, got {value!r}")
        return value
    if (section, key) in _INT_FIELDS:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{path}: expected an integer, got {value!r}")
        return value
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    return float(value)


def _levels_list(path: str, value) -> list:
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{path}: expected a non-empty list of numbers")
    out = []
    for i, v in enumerate(value):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"{path}[{i}]: expected a number, got {v!r}")
        out.append(float(v))
    return sorted(out)  # the level set is accepted in any order


def _scenario_entry(path: str, value) -> dict:
    if not isinstance(value, dict):
        raise ConfigError(f"{path}: expected an object")
    entry = {}
    for key, v in value.items():
        if key in ("small_cells", "d2d_pairs"):
            if isinstance(v, bool) or not isinstance(v, int):
                raise ConfigError(f"{path}.{key}: expected an integer, got {v!r}")
            entry[key] = v
        elif key == "levels_dbm":
            entry[key] = _levels_list(f"{path}.levels_dbm", v)
        else:
            raise ConfigError(f"{path}.{key}: unknown field")
    for key in ("small_cells", "d2d_pairs", "levels_dbm"):
        if key not in entry:
            raise ConfigError(f"{path}: missing field {key!r}")
    return entry


def _merge(data: dict) -> dict:
    merged = copy.deepcopy(_DEFAULTS)
    if not isinstance(data, dict):
        raise ConfigError(f"config: expected a JSON object, got {data!r}")
    for section, content in data.items():
        if section not in merged:
            raise ConfigError(f"config.{section}: unknown section")
        if not isinstance(content, dict):
            raise ConfigError(f"config.{section}: expected an object")
        for key, value in content.items():
            path = f"config.{section}.{key}"
            if key not in merged[section]:
                raise ConfigError(f"{path}: unknown field")
            if (section, key) == ("power", "levels_dbm"):
                merged[section][key] = _levels_list(path, value)
            elif (section, key) == ("plan", "scenarios"):
                if value is None:
                    continue
                if not isinstance(value, list) or not value:
                    raise ConfigError(f"{path}: expected a non-empty list")
                merged[section][key] = [
                    _scenario_entry(f"{path}[{i}]", v) for i, v in enumerate(value)]
            else:
                merged[section][key] = _check_scalar(path, section, key, value)
    return merged


@dataclass
class SimulationConfig:
    """Validated parameter bundle; construct through parse_config."""

    dims: ScenarioDims
    levels_dbm: tuple
    mbs_total_dbm: float
    threshold_dbm: float
    noise_psd_dbm_hz: float
    bandwidth_hz: float
    auction: AuctionParams
    propagation: PropagationParams
    realizations: int
    slots: int
    seed: int
    scenarios: tuple

    def power(self) -> PowerLevelTable:
        return PowerLevelTable.from_mbs_total(self.levels_dbm, self.mbs_total_dbm,
                                              self.dims.rbs)

    def interference(self) -> InterferenceSpec:
        return InterferenceSpec.uniform(self.threshold_dbm, self.dims.rbs,
                                        self.noise_psd_dbm_hz,
                                        self.bandwidth_hz / self.dims.rbs)

    def plan(self) -> ExperimentPlan:
        return ExperimentPlan(
            scenarios=self.scenarios, realizations=self.realizations,
            slots=self.slots, seed=self.seed, mues=self.dims.mues,
            rbs=self.dims.rbs, mbs_power_dbm=self.mbs_total_dbm,
            threshold_dbm=self.threshold_dbm,
            noise_psd_dbm_hz=self.noise_psd_dbm_hz,
            bandwidth_hz=self.bandwidth_hz, propagation=self.propagation,
            auction=self.auction)

    def effective(self) -> dict:
        """Full config dict; feeding it back reproduces this bundle."""
        return {
            "dims": {"mues": self.dims.mues, "small_cells": self.dims.small_cells,
                     "d2d_pairs": self.dims.d2d_pairs, "rbs": self.dims.rbs},
            "power": {"levels_dbm": list(self.levels_dbm),
                      "mbs_total_dbm": self.mbs_total_dbm},
            "interference": {"threshold_dbm": self.threshold_dbm,
                             "noise_psd_dbm_hz": self.noise_psd_dbm_hz,
                             "bandwidth_hz": self.bandwidth_hz},
            "auction": {"epsilon": self.auction.epsilon, "nu1": self.auction.nu1,
                        "nu2": self.auction.nu2, "t_max": self.auction.t_max,
                        "cost_scale": self.auction.cost_scale,
                        "convergence_window": self.auction.convergence_window,
                        "exclude_self_interference":
                            self.auction.exclude_self_interference,
                        "sequential": self.auction.sequential},
            "propagation": {
                "shadow_std_macro_d2d_db": self.propagation.shadow_std_macro_d2d_db,
                "shadow_std_small_db": self.propagation.shadow_std_small_db,
                "wall_loss_db": self.propagation.wall_loss_db,
                "area_side_m": self.propagation.area_side_m,
                "macro_radius_m": self.propagation.macro_radius_m,
                "small_radius_m": self.propagation.small_radius_m,
                "d2d_pair_distance_m": self.propagation.d2d_pair_distance_m,
                "min_mue_separation_m": self.propagation.min_mue_separation_m,
                "rayleigh_fading": self.propagation.rayleigh_fading},
            "plan": {"realizations": self.realizations, "slots": self.slots,
                     "seed": self.seed,
                     "scenarios": [
                         {"small_cells": s.small_cells, "d2d_pairs": s.d2d_pairs,
                          "levels_dbm": list(s.levels_dbm)}
                         for s in self.scenarios]},
        }


def config_from_dict(data: dict) -> SimulationConfig:
    merged = _merge(data)
    try:
        dims = ScenarioDims(merged["dims"]["mues"], merged["dims"]["small_cells"],
                            merged["dims"]["d2d_pairs"], merged["dims"]["rbs"],
                            len(merged["power"]["levels_dbm"]))
        auction = AuctionParams(**merged["auction"])
        propagation = PropagationParams(**merged["propagation"])
        if merged["interference"]["bandwidth_hz"] <= 0.0:
            raise ValueError("interference.bandwidth_hz must be > 0")
        scenarios = merged["plan"]["scenarios"]
        if scenarios is None:
            scenarios = [{"small_cells": dims.small_cells,
                          "d2d_pairs": dims.d2d_pairs,
                          "levels_dbm": merged["power"]["levels_dbm"]}]
        points = tuple(ScenarioPoint(s["small_cells"], s["d2d_pairs"],
                                     tuple(s["levels_dbm"])) for s in scenarios)
        cfg = SimulationConfig(
            dims=dims, levels_dbm=tuple(merged["power"]["levels_dbm"]),
            mbs_total_dbm=merged["power"]["mbs_total_dbm"],
            threshold_dbm=merged["interference"]["threshold_dbm"],
            noise_psd_dbm_hz=merged["interference"]["noise_psd_dbm_hz"],
            bandwidth_hz=merged["interference"]["bandwidth_hz"],
            auction=auction, propagation=propagation,
            realizations=merged["plan"]["realizations"],
            slots=merged["plan"]["slots"], seed=merged["plan"]["seed"],
            scenarios=points)
        cfg.power()       # surfaces power/dims range errors here, with paths
        cfg.plan()
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"config.{exc}") from exc
    return cfg


def parse_config(path) -> SimulationConfig:
    """Load and validate a JSON config file; empty file means all defaults."""
    text = Path(path).read_text(encoding="utf-8")
    if not text.strip():
        return config_from_dict({})
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON at line {exc.lineno}, "
                          f"column {exc.colno}: {exc.msg}") from exc
    return config_from_dict(data)

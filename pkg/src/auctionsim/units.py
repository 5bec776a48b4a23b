"""dBm/dB conversions.

Every solver-facing quantity in this package is kept in linear units
(watts, unitless gains); decibel values appear only at configuration
and reporting boundaries.
"""

import math


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(watts: float) -> float:
    if watts <= 0.0:
        raise ValueError(f"power must be positive to express in dBm, got {watts!r}")
    return 10.0 * math.log10(watts) + 30.0


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(value: float) -> float:
    if value <= 0.0:
        raise ValueError(f"value must be positive to express in dB, got {value!r}")
    return 10.0 * math.log10(value)

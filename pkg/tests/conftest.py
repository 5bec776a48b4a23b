"""Shared builders for solver-level tests.

Instances built here bypass the channel generator on purpose: gains are
drawn directly so the auction/oracle tests control every magnitude. The
channel tests exercise the generator itself.
"""

import numpy as np
import pytest

from auctionsim import (AuctionParams, GainTensor, InterferenceSpec,
                        PowerLevelTable)


def random_instance(rng, k=3, m=2, n=2, levels=(3.0, 5.0), scale=1e-7):
    """GainTensor with independent uniform gains at a workable magnitude."""
    direct = rng.uniform(0.1, 1.0, size=(k, n)) * scale
    cross = rng.uniform(0.001, 0.1, size=(k, k, n)) * scale
    cross[np.arange(k), np.arange(k), :] = 0.0
    mbs = rng.uniform(0.0001, 0.01, size=(k, n)) * scale
    to_mue = rng.uniform(0.001, 0.1, size=(k, m, n)) * scale
    return GainTensor(direct, cross, mbs, to_mue)


def small_power(levels=(3.0, 5.0), rbs=2, mbs_total_dbm=43.0):
    return PowerLevelTable.from_mbs_total(levels, mbs_total_dbm, rbs)


def small_spec(rbs=2, threshold_dbm=-70.0):
    return InterferenceSpec.uniform(threshold_dbm, rbs, -174.0, 180e3)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def params():
    return AuctionParams()

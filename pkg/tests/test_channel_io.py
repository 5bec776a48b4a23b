"""Channel dump/load round-trip."""

import json

import numpy as np
import pytest

from auctionsim import (PropagationParams, dump_channel, generate_topology,
                        load_channel, realize_gains)
from auctionsim.model import ScenarioDims

from conftest import random_instance

DIMS = ScenarioDims(mues=2, small_cells=2, d2d_pairs=1, rbs=2, levels=2)


def test_gains_round_trip_bit_equal(tmp_path, rng):
    gains = random_instance(rng)
    path = tmp_path / "channel.json"
    dump_channel(path, gains)
    loaded, topo = load_channel(path)
    assert topo is None
    for name in ("direct", "cross", "mbs_to_receiver", "tx_to_mue"):
        assert np.array_equal(getattr(loaded, name), getattr(gains, name))


def test_topology_round_trip(tmp_path):
    params = PropagationParams()
    topo = generate_topology(DIMS, params, np.random.default_rng(4))
    gains = realize_gains(topo, DIMS, params, np.random.default_rng(5),
                          np.random.default_rng(6))
    path = tmp_path / "channel.json"
    dump_channel(path, gains, topo)
    loaded_gains, loaded_topo = load_channel(path)
    assert np.array_equal(loaded_gains.direct, gains.direct)
    for name in ("mbs", "mues", "sbs", "sues", "d2d_tx", "d2d_rx"):
        assert np.array_equal(getattr(loaded_topo, name), getattr(topo, name))


def test_wrong_schema_rejected(tmp_path, rng):
    path = tmp_path / "channel.json"
    dump_channel(path, random_instance(rng))
    doc = json.loads(path.read_text())
    doc["schema"] = "auctionsim-channel-v999"
    path.write_text(json.dumps(doc))
    with pytest.raises(ValueError, match="auctionsim-channel-v1"):
        load_channel(path)


def test_missing_schema_rejected(tmp_path):
    path = tmp_path / "channel.json"
    path.write_text(json.dumps({"gains": {}}))
    with pytest.raises(ValueError, match="expected"):
        load_channel(path)

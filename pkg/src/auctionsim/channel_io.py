"""JSON round-trip for channel realizations (replay fixtures)."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .channel import Topology
from .model import GainTensor

SCHEMA = "auctionsim-channel-v1"


def dump_channel(path, gains: GainTensor, topology: Topology = None) -> None:
    """Write one fading draw (and optionally its layout) as JSON.

    json keeps full float round-trip precision, so a loaded tensor is
    bit-equal to the dumped one.
    """
    doc = {
        "schema": SCHEMA,
        "gains": {
            "direct": gains.direct.tolist(),
            "cross": gains.cross.tolist(),
            "mbs_to_receiver": gains.mbs_to_receiver.tolist(),
            "tx_to_mue": gains.tx_to_mue.tolist(),
        },
        "topology": None if topology is None else {
            "mbs": topology.mbs.tolist(),
            "mues": topology.mues.tolist(),
            "sbs": topology.sbs.tolist(),
            "sues": topology.sues.tolist(),
            "d2d_tx": topology.d2d_tx.tolist(),
            "d2d_rx": topology.d2d_rx.tolist(),
        },
    }
    Path(path).write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")


def load_channel(path) -> tuple:
    """Read a dump back; returns (GainTensor, Topology or None)."""
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if doc.get("schema") != SCHEMA:
        raise ValueError(f"unsupported channel schema {doc.get('schema')!r}; "
                         f"expected {SCHEMA!r}")
    g = doc["gains"]
    gains = GainTensor(np.array(g["direct"]), np.array(g["cross"]),
                       np.array(g["mbs_to_receiver"]), np.array(g["tx_to_mue"]))
    topo = None
    if doc.get("topology") is not None:
        t = doc["topology"]
        topo = Topology(np.array(t["mbs"]), np.array(t["mues"]),
                        np.array(t["sbs"]), np.array(t["sues"]),
                        np.array(t["d2d_tx"]), np.array(t["d2d_rx"]))
    return gains, topo

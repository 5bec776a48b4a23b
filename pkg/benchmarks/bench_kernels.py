#!/usr/bin/env python3
"""Time the compiled enumeration kernel against the NumPy fallback.

Usage: python3 benchmarks/bench_kernels.py [--transmitters 5] [--rbs 6]
       [--levels 2] [--repeat 3]

Prints per-instance wall time for each kernel and the speedup, and
re-verifies that both kernels return identical assignments on the
benchmark instances.
"""

import argparse
import statistics
import sys
import time
from pathlib import Path

import numpy as np

from auctionsim import AuctionParams, InterferenceSpec, PowerLevelTable
from auctionsim._kernels import ACTIVE
from auctionsim.oracle import exhaustive_optimum

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))
from conftest import random_instance  # noqa: E402


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--transmitters", type=int, default=5)
    parser.add_argument("--rbs", type=int, default=6)
    parser.add_argument("--levels", type=int, default=2)
    parser.add_argument("--instances", type=int, default=4)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    levels = tuple(3.0 + 2.0 * i for i in range(args.levels))
    power = PowerLevelTable.from_mbs_total(levels, 43.0, args.rbs)
    spec = InterferenceSpec.uniform(-70.0, args.rbs, -174.0, 1.08e6 / args.rbs)
    params = AuctionParams()
    rng = np.random.default_rng(0)
    instances = [random_instance(rng, k=args.transmitters, m=6, n=args.rbs,
                                 levels=levels)
                 for _ in range(args.instances)]
    space = (args.rbs * args.levels) ** args.transmitters
    print(f"search space: ({args.rbs} RBs x {args.levels} levels)^"
          f"{args.transmitters} = {space} assignments per instance")
    print(f"active kernel: {ACTIVE}")

    kernels = ["python"] + (["cython"] if ACTIVE == "cython" else [])
    medians = {}
    for kernel in kernels:
        times = []
        for gains in instances:
            best = None
            for _ in range(args.repeat):
                t0 = time.perf_counter()
                exhaustive_optimum(gains, power, spec, params,
                                   limit=10 ** 9, kernel=kernel)
                dt = time.perf_counter() - t0
                best = dt if best is None else min(best, dt)
            times.append(best)
        medians[kernel] = statistics.median(times)
        print(f"{kernel:>7}: {medians[kernel] * 1000:9.2f} ms/instance "
              f"(median of {args.instances} instances, best of {args.repeat})")

    if "cython" in medians:
        for gains in instances:
            a = exhaustive_optimum(gains, power, spec, params, limit=10 ** 9,
                                   kernel="python")
            b = exhaustive_optimum(gains, power, spec, params, limit=10 ** 9,
                                   kernel="cython")
            assert a.alloc == b.alloc, "kernels disagree on the optimum"
        print(f"speedup: {medians['python'] / medians['cython']:.1f}x "
              f"(results identical on all instances)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

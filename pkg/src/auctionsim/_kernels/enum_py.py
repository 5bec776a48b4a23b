"""Pure NumPy exhaustive-enumeration kernel.

Walks every (RB, level)^K assignment in lexicographic order
(transmitter 0 most significant) in vectorized chunks, masking
threshold-violating candidates and tracking the best feasible
objective. Strict improvement plus in-order chunks make ties resolve to
the lexicographically smallest assignment.
"""

import numpy as np

CHUNK = 1 << 16


def enumerate_best(direct, cross, mbs_to_receiver, ref_gain, level_w,
                   mbs_w_per_rb, thresholds_w, sigma2, nu1, w_rb,
                   start, stop):
    """Scan leaf indices [start, stop); see oracle.exhaustive_optimum.

    Returns (best_digits or None, best_value, feasible_count, evaluated).
    Values use kernel-local arithmetic; callers re-evaluate the winner
    through the reference objective before reporting.
    """
    k_count, n_count = direct.shape
    l_count = level_w.shape[0]
    resources = n_count * l_count
    best_value = -np.inf
    best_digits = None
    feasible_count = 0

    for lo in range(start, stop, CHUNK):
        hi = min(lo + CHUNK, stop)
        idx = np.arange(lo, hi, dtype=np.int64)
        digits = np.empty((hi - lo, k_count), dtype=np.int64)
        for k in range(k_count - 1, -1, -1):
            digits[:, k] = idx % resources
            idx //= resources
        rb = digits // l_count
        power = level_w[digits % l_count]

        agg = np.zeros((hi - lo, n_count))
        rows = np.arange(hi - lo)
        for k in range(k_count):
            agg[rows, rb[:, k]] += ref_gain[k, rb[:, k]] * power[:, k]
        feasible = np.all(agg < thresholds_w[None, :], axis=1)
        feasible_count += int(np.count_nonzero(feasible))
        if not np.any(feasible):
            continue

        recv = np.zeros((hi - lo, k_count))
        for i in range(k_count):
            for j in range(k_count):
                if i == j:
                    continue
                shared = rb[:, i] == rb[:, j]
                recv[:, j] += np.where(shared, cross[i, j, rb[:, j]] * power[:, i], 0.0)
        mbs_term = mbs_to_receiver[np.arange(k_count)[None, :], rb]
        den = mbs_term * mbs_w_per_rb + recv + sigma2
        num = direct[np.arange(k_count)[None, :], rb] * power
        objective = (nu1 * w_rb * np.log2(1.0 + num / den)).sum(axis=1)
        objective[~feasible] = -np.inf

        pick = int(np.argmax(objective))  # first max: lowest leaf in the chunk
        if objective[pick] > best_value:
            best_value = float(objective[pick])
            best_digits = digits[pick].copy()

    return best_digits, best_value, feasible_count, stop - start

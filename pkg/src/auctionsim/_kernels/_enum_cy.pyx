# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled exhaustive-enumeration kernel.

Same contract as enum_py.enumerate_best, but the scan is an odometer:
almost every step changes a single transmitter's (RB, level) digit, so
per-RB aggregated interference and per-receiver co-channel interference
are updated incrementally instead of being rebuilt per candidate.
"""

from libc.math cimport log2

import numpy as np


cdef inline void _apply(Py_ssize_t j, Py_ssize_t d_new, Py_ssize_t L, Py_ssize_t K,
                        double[:, :, ::1] cross, double[:, ::1] ref_gain,
                        double[::1] level_w,
                        Py_ssize_t[::1] digit, Py_ssize_t[::1] rb, double[::1] pw,
                        double[::1] agg, double[::1] recv) noexcept:
    cdef Py_ssize_t old_n = rb[j]
    cdef double old_p = pw[j]
    cdef Py_ssize_t new_n = d_new // L
    cdef double new_p = level_w[d_new % L]
    cdef Py_ssize_t i
    cdef double acc

    agg[old_n] -= ref_gain[j, old_n] * old_p
    agg[new_n] += ref_gain[j, new_n] * new_p

    for i in range(K):
        if i == j:
            continue
        if rb[i] == old_n:
            recv[i] -= cross[j, i, old_n] * old_p
        if rb[i] == new_n:
            recv[i] += cross[j, i, new_n] * new_p

    if new_n != old_n:
        # j's own received interference is rebuilt, not patched: the set of
        # co-channel interferers changes wholesale with the RB.
        acc = 0.0
        for i in range(K):
            if i != j and rb[i] == new_n:
                acc += cross[i, j, new_n] * pw[i]
        recv[j] = acc

    digit[j] = d_new
    rb[j] = new_n
    pw[j] = new_p


def enumerate_best(double[:, ::1] direct, double[:, :, ::1] cross,
                   double[:, ::1] mbs_to_receiver, double[:, ::1] ref_gain,
                   double[::1] level_w, double mbs_w_per_rb,
                   double[::1] thresholds_w, double sigma2, double nu1,
                   double w_rb, long long start, long long stop):
    """Scan leaf indices [start, stop); see oracle.exhaustive_optimum."""
    cdef Py_ssize_t K = direct.shape[0]
    cdef Py_ssize_t N = direct.shape[1]
    cdef Py_ssize_t L = level_w.shape[0]
    cdef Py_ssize_t R = N * L

    digit_arr = np.zeros(K, dtype=np.intp)
    rb_arr = np.zeros(K, dtype=np.intp)
    pw_arr = np.zeros(K, dtype=float)
    agg_arr = np.zeros(N, dtype=float)
    recv_arr = np.zeros(K, dtype=float)
    best_arr = np.full(K, -1, dtype=np.intp)
    cdef Py_ssize_t[::1] digit = digit_arr
    cdef Py_ssize_t[::1] rb = rb_arr
    cdef double[::1] pw = pw_arr
    cdef double[::1] agg = agg_arr
    cdef double[::1] recv = recv_arr
    cdef Py_ssize_t[::1] best_digits = best_arr

    cdef long long v = start
    cdef Py_ssize_t k, i, n, pos
    for k in range(K - 1, -1, -1):
        digit[k] = <Py_ssize_t> (v % R)
        v //= R
    for k in range(K):
        rb[k] = digit[k] // L
        pw[k] = level_w[digit[k] % L]
    for k in range(K):
        agg[rb[k]] += ref_gain[k, rb[k]] * pw[k]
    for k in range(K):
        recv[k] = 0.0
        for i in range(K):
            if i != k and rb[i] == rb[k]:
                recv[k] += cross[i, k, rb[k]] * pw[i]

    cdef long long count = stop - start
    cdef long long step, feasible_count = 0
    cdef double best_value = -np.inf
    cdef bint have_best = False, feasible
    cdef double obj, den
    cdef Py_ssize_t d_new

    for step in range(count):
        feasible = True
        for n in range(N):
            if agg[n] >= thresholds_w[n]:
                feasible = False
                break
        if feasible:
            feasible_count += 1
            obj = 0.0
            for k in range(K):
                n = rb[k]
                den = mbs_to_receiver[k, n] * mbs_w_per_rb + recv[k] + sigma2
                obj += nu1 * w_rb * log2(1.0 + direct[k, n] * pw[k] / den)
            if obj > best_value:  # strict: earlier (smaller) leaf wins ties
                best_value = obj
                for k in range(K):
                    best_digits[k] = digit[k]
                have_best = True

        if step == count - 1:
            break
        pos = K - 1
        while True:
            d_new = digit[pos] + 1
            if d_new == R:
                _apply(pos, 0, L, K, cross, ref_gain, level_w,
                       digit, rb, pw, agg, recv)
                pos -= 1
            else:
                _apply(pos, d_new, L, K, cross, ref_gain, level_w,
                       digit, rb, pw, agg, recv)
                break

    if not have_best:
        return None, float(best_value), int(feasible_count), int(count)
    return best_arr.astype(np.int64), float(best_value), int(feasible_count), int(count)

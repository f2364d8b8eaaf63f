# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled inner loops. Signatures mirror ``_kernels_py``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY

cnp.import_array()


def pava(double[::1] y, double[::1] w):
    """Weighted pool-adjacent-violators; returns the nondecreasing fit."""
    cdef Py_ssize_t n = y.shape[0]
    cdef Py_ssize_t i, k, r, b = 0
    cdef double[::1] val = np.empty(n)
    cdef double[::1] wt = np.empty(n)
    cdef Py_ssize_t[::1] size = np.empty(n, dtype=np.intp)
    cdef double nw
    out = np.empty(n)
    cdef double[::1] o = out
    for i in range(n):
        val[b] = y[i]
        wt[b] = w[i]
        size[b] = 1
        while b > 0 and val[b - 1] > val[b]:
            nw = wt[b - 1] + wt[b]
            val[b - 1] = (wt[b - 1] * val[b - 1] + wt[b] * val[b]) / nw
            wt[b - 1] = nw
            size[b - 1] += size[b]
            b -= 1
        b += 1
    i = 0
    for k in range(b):
        for r in range(size[k]):
            o[i] = val[k]
            i += 1
    return out


def meanshift_dp(double[::1] x, int max_breaks, int min_seg):
    """Optimal mean-shift segmentations with 0..max_breaks breaks.

    Returns ``(ssr, ends)``: ``ssr[m]`` is the minimal total within-segment
    sum of squares with ``m`` breaks (inf when infeasible) and ``ends[m]``
    the sorted break indices (start index of each new segment).
    """
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t i, j, m, best_i
    cdef double[::1] s1 = np.zeros(n + 1)
    cdef double[::1] s2 = np.zeros(n + 1)
    cdef double c, cand, best, d, seg
    for i in range(n):
        s1[i + 1] = s1[i] + x[i]
        s2[i + 1] = s2[i] + x[i] * x[i]
    cost_arr = np.full((max_breaks + 1, n + 1), INFINITY)
    arg_arr = np.full((max_breaks + 1, n + 1), -1, dtype=np.intp)
    cdef double[:, ::1] cost = cost_arr
    cdef Py_ssize_t[:, ::1] arg = arg_arr
    for j in range(min_seg, n + 1):
        d = s1[j]
        cost[0, j] = s2[j] - d * d / j
    for m in range(1, max_breaks + 1):
        for j in range((m + 1) * min_seg, n + 1):
            best = INFINITY
            best_i = -1
            for i in range(m * min_seg, j - min_seg + 1):
                c = cost[m - 1, i]
                if c == INFINITY:
                    continue
                seg = j - i
                d = s1[j] - s1[i]
                cand = c + (s2[j] - s2[i]) - d * d / seg
                if cand < best:
                    best = cand
                    best_i = i
            cost[m, j] = best
            arg[m, j] = best_i
    ssr = np.full(max_breaks + 1, INFINITY)
    ends = []
    for m in range(max_breaks + 1):
        ssr[m] = cost[m, n]
        bks = []
        if cost[m, n] < INFINITY:
            j = n
            for k in range(m, 0, -1):
                j = arg[k, j]
                bks.append(int(j))
        ends.append(sorted(bks))
    return ssr, ends


def self_consistent_window(double[::1] acf, double c):
    """Smallest window M >= c * tau(M); returns (tau, M)."""
    cdef Py_ssize_t n = acf.shape[0]
    cdef Py_ssize_t m
    cdef double tau = 0.5
    for m in range(1, n):
        tau += acf[m]
        if m >= c * tau:
            return tau, m
    return tau, n - 1

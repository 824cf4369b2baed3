# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: pairwise distances and tree split scans.

Kept bit-compatible with _pure: sequential accumulation everywhere, and the
same scoring expressions (compile with fp-contract off so no FMA creeps in).
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

cdef double NEG_INF = -float("inf")


def pairwise_sq_dists(a, b):
    """Squared Euclidean distances between rows of a and rows of b."""
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[1]:
        raise ValueError("pairwise_sq_dists needs 2-d inputs with equal width")
    cdef double[:, ::1] av = a
    cdef double[:, ::1] bv = b
    cdef Py_ssize_t ma = av.shape[0], mb = bv.shape[0], d = av.shape[1]
    out = np.empty((ma, mb), dtype=np.float64)
    cdef double[:, ::1] ov = out
    cdef Py_ssize_t i, j, k
    cdef double acc, diff
    for i in range(ma):
        for j in range(mb):
            acc = 0.0
            for k in range(d):
                diff = av[i, k] - bv[j, k]
                acc = acc + diff * diff
            ov[i, j] = acc
    return out


def split_scan_sorted(x, y, Py_ssize_t min_leaf):
    """Best boundary split of a feature already sorted ascending.

    Same contract as _pure.split_scan_sorted.
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    cdef double[::1] xv = x
    cdef double[::1] yv = y
    cdef Py_ssize_t n = xv.shape[0]
    if n < 2:
        return -1, float("nan"), 0.0

    cdef double s1 = 0.0, s2 = 0.0
    cdef Py_ssize_t i
    for i in range(n):
        s1 = s1 + yv[i]
        s2 = s2 + yv[i] * yv[i]
    cdef double nf = <double> n
    cdef double sse_parent = s2 - s1 * s1 / nf

    cdef double left1 = 0.0, left2 = 0.0
    cdef double sse_left, sse_right, gain, threshold
    cdef double best_gain = NEG_INF
    cdef Py_ssize_t best = -1
    for i in range(1, n):
        left1 = left1 + yv[i - 1]
        left2 = left2 + yv[i - 1] * yv[i - 1]
        if i < min_leaf or n - i < min_leaf:
            continue
        if xv[i] <= xv[i - 1]:
            continue
        sse_left = left2 - left1 * left1 / (<double> i)
        sse_right = (s2 - left2) - (s1 - left1) * (s1 - left1) / (nf - (<double> i))
        gain = sse_parent - sse_left - sse_right
        if gain > best_gain:
            best_gain = gain
            best = i
    if best < 0:
        return -1, float("nan"), 0.0
    threshold = (xv[best - 1] + xv[best]) / 2.0
    if threshold == xv[best]:
        threshold = xv[best - 1]
    return best, threshold, best_gain


def hist_split_scan(binned, idx, grad, int n_bins):
    """Best histogram split over all features for one tree node.

    Same contract as _pure.hist_split_scan.
    """
    binned = np.ascontiguousarray(binned, dtype=np.int32)
    idx = np.ascontiguousarray(idx, dtype=np.int64)
    grad = np.ascontiguousarray(grad, dtype=np.float64)
    cdef cnp.int32_t[:, ::1] bv = binned
    cdef cnp.int64_t[::1] iv = idx
    cdef double[::1] gv = grad
    cdef Py_ssize_t d = bv.shape[1], m = iv.shape[0]

    sums_arr = np.empty(n_bins, dtype=np.float64)
    counts_arr = np.empty(n_bins, dtype=np.float64)
    cdef double[::1] sums = sums_arr
    cdef double[::1] counts = counts_arr

    cdef Py_ssize_t f, t, b, row
    cdef double total_sum, total_n, sl, nl, gain
    cdef double best_gain = NEG_INF
    cdef Py_ssize_t best_f = -1, best_b = -1
    for f in range(d):
        for b in range(n_bins):
            sums[b] = 0.0
            counts[b] = 0.0
        for t in range(m):
            row = iv[t]
            b = bv[row, f]
            sums[b] = sums[b] + gv[row]
            counts[b] = counts[b] + 1.0
        total_sum = 0.0
        total_n = 0.0
        for b in range(n_bins):
            total_sum = total_sum + sums[b]
            total_n = total_n + counts[b]
        sl = 0.0
        nl = 0.0
        for b in range(n_bins - 1):
            sl = sl + sums[b]
            nl = nl + counts[b]
            if nl <= 0.0 or nl >= total_n:
                continue
            gain = (
                sl * sl / nl
                + (total_sum - sl) * (total_sum - sl) / (total_n - nl)
                - total_sum * total_sum / total_n
            )
            if gain > best_gain:
                best_gain = gain
                best_f = f
                best_b = b
    if best_f < 0:
        return -1, -1, 0.0
    return best_f, best_b, best_gain

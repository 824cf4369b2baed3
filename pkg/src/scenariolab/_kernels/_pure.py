"""Pure numpy implementations of the hot kernels.

Drop-in fallback for the compiled extension. Every function here is written
to produce bit-identical results to the compiled kernel: reductions use
sequential accumulation order (cumsum/bincount/accumulate) and the scoring
expressions mirror the C ones operation for operation.
"""

from __future__ import annotations

import numpy as np


def pairwise_sq_dists(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Squared Euclidean distances between rows of a and rows of b."""
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[1]:
        raise ValueError("pairwise_sq_dists needs 2-d inputs with equal width")
    ma, d = a.shape
    mb = b.shape[0]
    out = np.empty((ma, mb), dtype=np.float64)
    if d == 0:
        out.fill(0.0)
        return out
    # Chunk rows of a to bound the temporary (ma*mb*d) array.
    step = max(1, int(4_000_000 // max(1, mb * d)))
    for s in range(0, ma, step):
        diff = a[s : s + step, None, :] - b[None, :, :]
        np.multiply(diff, diff, out=diff)
        # add.accumulate sums features in index order, matching the
        # compiled kernel's sequential loop bit for bit.
        out[s : s + step] = np.add.accumulate(diff, axis=2)[:, :, -1]
    return out


def split_scan_sorted(
    x: np.ndarray, y: np.ndarray, min_leaf: int
) -> tuple[int, float, float]:
    """Best boundary split of a feature already sorted ascending.

    Returns (pos, threshold, gain): the first pos elements go left,
    threshold is the midpoint between the straddling values, gain is the
    reduction in total squared error. pos == -1 means no admissible split.
    Ties resolve to the lowest position.
    """
    n = x.shape[0]
    if n < 2:
        return -1, float("nan"), 0.0
    cs1 = np.cumsum(y)
    cs2 = np.cumsum(y * y)
    s1 = cs1[-1]
    s2 = cs2[-1]
    nf = float(n)
    sse_parent = s2 - s1 * s1 / nf

    pos = np.arange(1, n)
    valid = x[1:] > x[:-1]
    if min_leaf > 0:
        valid &= (pos >= min_leaf) & (n - pos >= min_leaf)
    if not valid.any():
        return -1, float("nan"), 0.0

    left1 = cs1[:-1]
    left2 = cs2[:-1]
    nl = pos.astype(np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        sse_left = left2 - left1 * left1 / nl
        sse_right = (s2 - left2) - (s1 - left1) * (s1 - left1) / (nf - nl)
        gains = sse_parent - sse_left - sse_right
    gains = np.where(valid, gains, -np.inf)
    best = int(np.argmax(gains))
    i = best + 1
    threshold = (x[i - 1] + x[i]) / 2.0
    if threshold == x[i]:
        threshold = x[i - 1]
    return i, float(threshold), float(gains[best])


def hist_split_scan(
    binned: np.ndarray, idx: np.ndarray, grad: np.ndarray, n_bins: int
) -> tuple[int, int, float]:
    """Best histogram split over all features for one tree node.

    binned is the (n, d) int32 bin-index matrix for the full training set,
    idx selects the node's rows, grad holds the residuals being fitted.
    Returns (feature, bin, gain) where rows with bin index <= bin go left
    and gain is the reduction in squared error; feature == -1 means no
    candidate splits the node. Ties resolve to the lowest feature then bin.
    """
    sub = binned[idx]
    g = grad[idx]
    d = binned.shape[1]
    best_f = -1
    best_b = -1
    best_gain = -np.inf
    for f in range(d):
        bf = sub[:, f]
        sums = np.bincount(bf, weights=g, minlength=n_bins)
        counts = np.bincount(bf, minlength=n_bins)
        cs = np.cumsum(sums)
        cc = np.cumsum(counts)
        total_sum = cs[-1]
        total_n = float(cc[-1])
        sl = cs[:-1]
        nl = cc[:-1].astype(np.float64)
        valid = (nl > 0) & (nl < total_n)
        if not valid.any():
            continue
        with np.errstate(divide="ignore", invalid="ignore"):
            gains = (
                sl * sl / nl
                + (total_sum - sl) * (total_sum - sl) / (total_n - nl)
                - total_sum * total_sum / total_n
            )
        gains = np.where(valid, gains, -np.inf)
        b = int(np.argmax(gains))
        if gains[b] > best_gain:
            best_f = f
            best_b = b
            best_gain = float(gains[b])
    if best_f < 0:
        return -1, -1, 0.0
    return best_f, best_b, best_gain

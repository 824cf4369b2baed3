"""Gradient boosted trees for squared loss with histogram split search.

Stagewise boosting on residuals: each stage fits a regression tree whose
split candidates are the boundaries of n_bins equal-width bins per feature,
with bin edges fitted once on the training data. The model predicts
mean(y_train) + learning_rate * sum of tree outputs; n_trees = 0 therefore
degenerates to the training mean.
"""

from __future__ import annotations

import numpy as np

from .. import _kernels


class HistNode:
    __slots__ = ("feature", "bin", "left", "right", "value")

    def __init__(self, value, feature=-1, split_bin=-1, left=None, right=None):
        self.value = value
        self.feature = feature
        self.bin = split_bin
        self.left = left
        self.right = right

    @property
    def is_leaf(self):
        return self.left is None


class GbtState:
    def __init__(self, base, lo, width, n_bins, learning_rate, trees):
        self.base = base
        self.lo = lo
        self.width = width
        self.n_bins = n_bins
        self.learning_rate = learning_rate
        self.trees = trees


def _bin_indices(X, lo, width, n_bins) -> np.ndarray:
    """Equal-width bin index per cell; constant features land in bin 0."""
    with np.errstate(divide="ignore", invalid="ignore"):
        b = np.floor((X - lo) / width)
    b = np.where(np.isfinite(b), b, 0.0)
    return np.clip(b, 0, n_bins - 1).astype(np.int32)


def _grow(binned, resid, idx, depth, max_depth, n_bins) -> HistNode:
    node = HistNode(value=float(resid[idx].mean()))
    if depth >= max_depth or len(idx) < 2:
        return node
    feature, split_bin, gain = _kernels.hist_split_scan(binned, idx, resid, n_bins)
    if feature < 0 or gain <= 0.0:
        return node
    mask = binned[idx, feature] <= split_bin
    node.feature = feature
    node.bin = split_bin
    node.left = _grow(binned, resid, idx[mask], depth + 1, max_depth, n_bins)
    node.right = _grow(binned, resid, idx[~mask], depth + 1, max_depth, n_bins)
    return node


def _predict_binned(root: HistNode, binned: np.ndarray) -> np.ndarray:
    out = np.empty(len(binned), dtype=np.float64)
    stack = [(root, np.arange(len(binned)))]
    while stack:
        node, rows = stack.pop()
        if len(rows) == 0:
            continue
        if node.is_leaf:
            out[rows] = node.value
        else:
            mask = binned[rows, node.feature] <= node.bin
            stack.append((node.left, rows[mask]))
            stack.append((node.right, rows[~mask]))
    return out


def fit(params: dict, X: np.ndarray, y: np.ndarray, seed: int) -> GbtState:
    # Seed unused: histogram boosting is deterministic.
    n_bins = params["n_bins"]
    lo = X.min(axis=0)
    width = (X.max(axis=0) - lo) / n_bins
    binned = _bin_indices(X, lo, width, n_bins)

    base = float(y.mean())
    resid = y - base
    lr = params["learning_rate"]
    trees = []
    idx = np.arange(len(y), dtype=np.int64)
    for _ in range(params["n_trees"]):
        root = _grow(binned, resid, idx, 0, params["max_depth"], n_bins)
        resid = resid - lr * _predict_binned(root, binned)
        trees.append(root)
    return GbtState(base, lo, width, n_bins, lr, trees)


def predict(state: GbtState, X: np.ndarray) -> np.ndarray:
    binned = _bin_indices(X, state.lo, state.width, state.n_bins)
    out = np.full(len(X), state.base, dtype=np.float64)
    for root in state.trees:
        out += state.learning_rate * _predict_binned(root, binned)
    return out


def _node_dict(node: HistNode, edges_for) -> dict:
    if node.is_leaf:
        return {"value": node.value}
    return {
        "feature": node.feature,
        "split_bin": node.bin,
        "split_edge": edges_for(node.feature, node.bin),
        "left": _node_dict(node.left, edges_for),
        "right": _node_dict(node.right, edges_for),
    }


def dump_state(state: GbtState) -> dict:
    def edge(feature, split_bin):
        return float(state.lo[feature] + (split_bin + 1) * state.width[feature])

    return {
        "base": state.base,
        "learning_rate": state.learning_rate,
        "n_bins": state.n_bins,
        "bin_lo": state.lo.tolist(),
        "bin_width": state.width.tolist(),
        "trees": [_node_dict(t, edge) for t in state.trees],
    }

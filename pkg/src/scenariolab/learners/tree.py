"""Binary regression tree with variance-reduction splits.

Thresholds are searched exhaustively over midpoints of consecutive distinct
sorted feature values. A split is kept only while the node depth is below
max_depth, both children hold at least min_leaf_size examples and the
relative variance reduction reaches min_gain; otherwise the node becomes a
leaf predicting its target mean. Trees see raw (unstandardized) features.
"""

from __future__ import annotations

import numpy as np

from .. import _kernels


class TreeNode:
    __slots__ = ("feature", "threshold", "left", "right", "value", "n")

    def __init__(self, value, n, feature=-1, threshold=0.0, left=None, right=None):
        self.value = value
        self.n = n
        self.feature = feature
        self.threshold = threshold
        self.left = left
        self.right = right

    @property
    def is_leaf(self):
        return self.left is None


def _node_sse(y: np.ndarray) -> float:
    mean = y.mean()
    d = y - mean
    return float(np.dot(d, d))


def _find_split(X, y, idx, min_leaf):
    """Best (feature, threshold, gain, sse_parent) over all features."""
    ys = y[idx]
    sse_parent = _node_sse(ys)
    if sse_parent <= 0.0:
        return None
    best = None
    for f in range(X.shape[1]):
        xf = X[idx, f]
        order = np.argsort(xf, kind="stable")
        pos, threshold, gain = _kernels.split_scan_sorted(
            xf[order], ys[order], min_leaf
        )
        if pos < 0:
            continue
        if best is None or gain > best[2]:
            best = (f, threshold, gain, sse_parent)
    return best


def _grow(X, y, idx, depth, params) -> TreeNode:
    node_y = y[idx]
    node = TreeNode(value=float(node_y.mean()), n=len(idx))
    if depth >= params["max_depth"] or len(idx) < 2 * params["min_leaf_size"]:
        return node
    found = _find_split(X, y, idx, params["min_leaf_size"])
    if found is None:
        return node
    feature, threshold, gain, sse_parent = found
    if gain / sse_parent < params["min_gain"]:
        return node
    mask = X[idx, feature] <= threshold
    node.feature = feature
    node.threshold = threshold
    node.left = _grow(X, y, idx[mask], depth + 1, params)
    node.right = _grow(X, y, idx[~mask], depth + 1, params)
    return node


def fit(params: dict, X: np.ndarray, y: np.ndarray, seed: int) -> TreeNode:
    # Seed unused: the exhaustive search is deterministic.
    return _grow(X, y, np.arange(len(y)), 0, params)


def predict(root: TreeNode, X: np.ndarray) -> np.ndarray:
    out = np.empty(len(X), dtype=np.float64)
    stack = [(root, np.arange(len(X)))]
    while stack:
        node, rows = stack.pop()
        if len(rows) == 0:
            continue
        if node.is_leaf:
            out[rows] = node.value
        else:
            mask = X[rows, node.feature] <= node.threshold
            stack.append((node.left, rows[mask]))
            stack.append((node.right, rows[~mask]))
    return out


def _node_dict(node: TreeNode) -> dict:
    if node.is_leaf:
        return {"value": node.value, "n": node.n}
    return {
        "feature": node.feature,
        "threshold": node.threshold,
        "n": node.n,
        "left": _node_dict(node.left),
        "right": _node_dict(node.right),
    }


def dump_state(root: TreeNode) -> dict:
    return {"tree": _node_dict(root)}

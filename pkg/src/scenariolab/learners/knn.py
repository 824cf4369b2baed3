"""k-nearest-neighbour regression on standardized features.

Prediction is the unweighted mean of the k nearest training targets under
Euclidean distance; distance ties resolve to the lower training index. A k
larger than the training set is clamped to it, so k = n predicts the
training mean everywhere.
"""

from __future__ import annotations

import numpy as np

from .. import _kernels


class KnnState:
    def __init__(self, X: np.ndarray, y: np.ndarray, k: int):
        self.X = X
        self.y = y
        self.k = min(k, len(y))


def fit(params: dict, X: np.ndarray, y: np.ndarray, seed: int) -> KnnState:
    # Seed unused: KNN consumes no randomness.
    return KnnState(X.copy(), y.copy(), params["k"])


def predict(state: KnnState, X: np.ndarray) -> np.ndarray:
    d2 = _kernels.pairwise_sq_dists(X, state.X)
    # Stable sort keeps equal distances in training-index order.
    order = np.argsort(d2, axis=1, kind="stable")[:, : state.k]
    return state.y[order].mean(axis=1)


def dump_state(state: KnnState) -> dict:
    return {
        "k": state.k,
        "train_features": state.X.tolist(),
        "train_targets": state.y.tolist(),
    }

"""Fully connected feed-forward regressor trained by mini-batch SGD.

Hidden layers (default two of 50 units) use the configured activation
(Rectifier, Tanh, or ExpRectifier i.e. the exponential linear unit); the
output is linear and the loss is half the mean squared error. Weights start
uniform in +-1/sqrt(fan_in) drawn from the seeded generator, biases at
zero; batch order reshuffles every epoch from the same generator. Inputs
arrive standardized from the dispatch layer; the target is standardized
here (and predictions de-standardized) so the fixed step size works across
target scales.
"""

from __future__ import annotations

import numpy as np


def _relu(z):
    return np.maximum(z, 0.0)


def _relu_grad(z, a):
    return (z > 0.0).astype(np.float64)


def _tanh_grad(z, a):
    return 1.0 - a * a


def _elu(z):
    return np.where(z > 0.0, z, np.expm1(z))


def _elu_grad(z, a):
    return np.where(z > 0.0, 1.0, a + 1.0)


ACTIVATIONS = {
    "Rectifier": (_relu, _relu_grad),
    "Tanh": (np.tanh, _tanh_grad),
    "ExpRectifier": (_elu, _elu_grad),
}


class DlState:
    def __init__(self, weights, activation, y_mean, y_std):
        self.weights = weights  # list of (W, b) per layer
        self.activation = activation
        self.y_mean = y_mean
        self.y_std = y_std


def init_weights(rng: np.random.Generator, sizes: list[int]):
    weights = []
    for fan_in, fan_out in zip(sizes, sizes[1:]):
        limit = 1.0 / np.sqrt(fan_in)
        W = rng.uniform(-limit, limit, size=(fan_in, fan_out))
        weights.append((W, np.zeros(fan_out)))
    return weights


def forward(weights, X, activation):
    act, _ = ACTIVATIONS[activation]
    a = X
    pre, post = [], [X]
    last = len(weights) - 1
    for layer, (W, b) in enumerate(weights):
        z = a @ W + b
        pre.append(z)
        a = act(z) if layer < last else z
        post.append(a)
    return pre, post


def loss_and_grads(weights, X, y, activation):
    """Half mean squared error and its gradient for every weight and bias."""
    _, act_grad = ACTIVATIONS[activation]
    pre, post = forward(weights, X, activation)
    m = len(y)
    err = post[-1][:, 0] - y
    loss = 0.5 * float(err @ err) / m

    grads = [None] * len(weights)
    delta = (err / m)[:, None]
    for layer in range(len(weights) - 1, -1, -1):
        gW = post[layer].T @ delta
        gb = delta.sum(axis=0)
        grads[layer] = (gW, gb)
        if layer > 0:
            delta = (delta @ weights[layer][0].T) * act_grad(
                pre[layer - 1], post[layer]
            )
    return loss, grads


def fit(params: dict, X: np.ndarray, y: np.ndarray, seed: int) -> DlState:
    # The target trains standardized as well: a fixed SGD step on raw
    # targets of arbitrary scale either crawls or diverges.
    y_mean = float(y.mean())
    y_std = float(y.std())
    if y_std == 0.0:
        y_std = 1.0
    y_fit = (y - y_mean) / y_std

    rng = np.random.default_rng(seed)
    sizes = [X.shape[1], *params["hidden_layers"], 1]
    weights = init_weights(rng, sizes)
    lr = params["learning_rate"]
    batch_size = params["batch_size"]
    m = len(y)
    for _ in range(params["epochs"]):
        order = rng.permutation(m)
        for start in range(0, m, batch_size):
            batch = order[start : start + batch_size]
            _, grads = loss_and_grads(
                weights, X[batch], y_fit[batch], params["activation"]
            )
            weights = [
                (W - lr * gW, b - lr * gb)
                for (W, b), (gW, gb) in zip(weights, grads)
            ]
    return DlState(weights, params["activation"], y_mean, y_std)


def predict(state: DlState, X: np.ndarray) -> np.ndarray:
    _, post = forward(state.weights, X, state.activation)
    return post[-1][:, 0] * state.y_std + state.y_mean


def dump_state(state: DlState) -> dict:
    return {
        "activation": state.activation,
        "target_mean": state.y_mean,
        "target_std": state.y_std,
        "layers": [
            {"weights": W.tolist(), "biases": b.tolist()} for W, b in state.weights
        ],
    }

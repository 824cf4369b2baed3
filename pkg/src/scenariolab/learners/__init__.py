"""Four regression learners behind one train/predict interface.

KNN, DT, GBT and DL are implemented from first principles on numpy (the
tree and distance inner loops go through the _kernels backend). Shipped
defaults: KNN k=5 Euclidean, DT depth 4, GBT 50 trees, DL Rectifier with
5 epochs. Training is deterministic given (config, data, seed); all
randomness derives from the seed.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import ConfigError, FeatureShapeError, NonFiniteDataError
from ..windowing import WindowedTable
from . import boosting, knn, neural, tree

ALGORITHMS = ("KNN", "DT", "GBT", "DL")

DEFAULT_PARAMS = {
    "KNN": {"k": 5, "measure": "Euclidean"},
    "DT": {"max_depth": 4, "min_gain": 0.01, "min_leaf_size": 2},
    "GBT": {"n_trees": 50, "max_depth": 7, "learning_rate": 0.01, "n_bins": 20},
    "DL": {
        "activation": "Rectifier",
        "epochs": 5,
        "hidden_layers": (50, 50),
        "learning_rate": 0.01,
        "batch_size": 32,
    },
}

# Feature standardization (fit on the training split) applies to the
# distance- and gradient-based learners; trees are scale-equivariant.
STANDARDIZED = ("KNN", "DL")

ACTIVATIONS = ("Rectifier", "Tanh", "ExpRectifier")


def _validate(algorithm: str, params: dict):
    if algorithm == "KNN":
        if params["k"] < 1:
            raise ConfigError("KNN k must be >= 1")
        if params["measure"] != "Euclidean":
            raise ConfigError(f"unsupported KNN measure {params['measure']!r}")
    elif algorithm == "DT":
        if params["max_depth"] < 1:
            raise ConfigError("DT max_depth must be >= 1")
        if params["min_gain"] < 0:
            raise ConfigError("DT min_gain must be >= 0")
        if params["min_leaf_size"] < 1:
            raise ConfigError("DT min_leaf_size must be >= 1")
    elif algorithm == "GBT":
        if params["n_trees"] < 0:
            raise ConfigError("GBT n_trees must be >= 0")
        if params["max_depth"] < 1:
            raise ConfigError("GBT max_depth must be >= 1")
        if not 0 < params["learning_rate"] <= 1:
            raise ConfigError("GBT learning_rate must be in (0, 1]")
        if params["n_bins"] < 2:
            raise ConfigError("GBT n_bins must be >= 2")
    elif algorithm == "DL":
        if params["activation"] not in ACTIVATIONS:
            raise ConfigError(
                f"unknown DL activation {params['activation']!r}; "
                f"expected one of {ACTIVATIONS}"
            )
        if params["epochs"] < 1:
            raise ConfigError("DL epochs must be >= 1")
        if not 0 < params["learning_rate"] <= 1:
            raise ConfigError("DL learning_rate must be in (0, 1]")
        if params["batch_size"] < 1:
            raise ConfigError("DL batch_size must be >= 1")
        layers = tuple(int(h) for h in params["hidden_layers"])
        if not layers or any(h < 1 for h in layers):
            raise ConfigError("DL hidden_layers must be non-empty positive sizes")
        params["hidden_layers"] = layers


@dataclass(frozen=True)
class LearnerConfig:
    """Algorithm identifier plus a fully resolved parameter map.

    Overrides are merged over the algorithm defaults at construction;
    unknown parameter names are rejected.
    """

    algorithm: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(
                f"unknown algorithm {self.algorithm!r}; expected one of {ALGORITHMS}"
            )
        defaults = DEFAULT_PARAMS[self.algorithm]
        unknown = set(self.params) - set(defaults)
        if unknown:
            raise ConfigError(
                f"{self.algorithm}: unknown parameter(s) {sorted(unknown)}"
            )
        merged = {**defaults, **self.params}
        _validate(self.algorithm, merged)
        object.__setattr__(self, "params", merged)

    def with_params(self, **overrides) -> "LearnerConfig":
        return LearnerConfig(self.algorithm, {**self.params, **overrides})


@dataclass(frozen=True)
class TrainedModel:
    """Opaque fitted predictor; immutable and safe to share across threads."""

    config: LearnerConfig
    n_features: int
    feature_names: tuple[str, ...]
    standardization: tuple[np.ndarray, np.ndarray] | None
    state: object
    train_fingerprint: str
    seed: int


_FIT = {"KNN": knn.fit, "DT": tree.fit, "GBT": boosting.fit, "DL": neural.fit}
_PREDICT = {
    "KNN": knn.predict,
    "DT": tree.predict,
    "GBT": boosting.predict,
    "DL": neural.predict,
}


def _as_matrix(X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise FeatureShapeError(f"expected a 2-d feature matrix, got ndim={X.ndim}")
    return X


def _fingerprint(X: np.ndarray, y: np.ndarray) -> str:
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(X).tobytes())
    h.update(np.ascontiguousarray(y).tobytes())
    return h.hexdigest()[:16]


def train_xy(
    config: LearnerConfig,
    X,
    y,
    seed: int,
    feature_names: tuple[str, ...] | None = None,
) -> TrainedModel:
    """Fit a learner on raw arrays (train() wraps this for WindowedTable)."""
    X = _as_matrix(X)
    y = np.asarray(y, dtype=np.float64)
    if len(X) != len(y):
        raise FeatureShapeError(f"X has {len(X)} rows but y has {len(y)}")
    if len(y) == 0:
        raise ConfigError("training set is empty")
    if not (np.isfinite(X).all() and np.isfinite(y).all()):
        raise NonFiniteDataError("training data contains NaN or infinity")

    standardization = None
    X_fit = X
    if config.algorithm in STANDARDIZED:
        mean = X.mean(axis=0)
        std = X.std(axis=0)
        std = np.where(std == 0.0, 1.0, std)
        standardization = (mean, std)
        X_fit = (X - mean) / std

    state = _FIT[config.algorithm](config.params, X_fit, y, seed)
    if feature_names is None:
        feature_names = tuple(f"f{i}" for i in range(X.shape[1]))
    return TrainedModel(
        config=config,
        n_features=X.shape[1],
        feature_names=tuple(feature_names),
        standardization=standardization,
        state=state,
        train_fingerprint=_fingerprint(X, y),
        seed=seed,
    )


def train(config: LearnerConfig, train_table: WindowedTable, seed: int) -> TrainedModel:
    """Fit a learner on a windowed table."""
    return train_xy(
        config,
        train_table.X,
        train_table.y,
        seed,
        feature_names=train_table.feature_names,
    )


def predict(model: TrainedModel, X) -> np.ndarray:
    """Predict targets for a feature matrix; width must match training."""
    X = _as_matrix(X)
    if X.shape[1] != model.n_features:
        raise FeatureShapeError(
            f"model was trained on {model.n_features} features, got {X.shape[1]}"
        )
    if not np.isfinite(X).all():
        raise NonFiniteDataError("prediction input contains NaN or infinity")
    if model.standardization is not None:
        mean, std = model.standardization
        X = (X - mean) / std
    out = _PREDICT[model.config.algorithm](model.state, X)
    if not np.isfinite(out).all():
        raise NonFiniteDataError("model produced non-finite predictions")
    return out


DUMP_FORMAT_VERSION = 1


def dump_model(model: TrainedModel, path):
    """Write a JSON description of the fitted model for inspection."""
    doc = {
        "format_version": DUMP_FORMAT_VERSION,
        "algorithm": model.config.algorithm,
        "params": {
            k: list(v) if isinstance(v, tuple) else v
            for k, v in model.config.params.items()
        },
        "seed": model.seed,
        "train_fingerprint": model.train_fingerprint,
        "feature_names": list(model.feature_names),
        "standardization": None
        if model.standardization is None
        else {
            "mean": model.standardization[0].tolist(),
            "std": model.standardization[1].tolist(),
        },
        "state": _DUMP_STATE[model.config.algorithm](model.state),
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


_DUMP_STATE = {
    "KNN": knn.dump_state,
    "DT": tree.dump_state,
    "GBT": boosting.dump_state,
    "DL": neural.dump_state,
}

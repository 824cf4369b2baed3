import numpy as np
import pytest

from scenariolab import LearnerConfig, predict, train_xy


def fit(X, y, **params):
    return train_xy(LearnerConfig("GBT", params), np.asarray(X, float), np.asarray(y, float), seed=0)


def test_zero_trees_predicts_training_mean(rng):
    X = rng.normal(size=(20, 3))
    y = rng.normal(size=20) * 7
    out = predict(fit(X, y, n_trees=0), rng.normal(size=(9, 3)))
    assert np.all(np.abs(out - y.mean()) <= 1e-12)


def test_single_stump_full_rate_hits_leaf_means():
    X = np.array([[1.0], [2.0], [9.0], [10.0]])
    y = np.array([0.0, 0.0, 10.0, 10.0])
    model = fit(X, y, n_trees=1, max_depth=1, learning_rate=1.0, n_bins=4)
    out = predict(model, X)
    assert np.allclose(out, y, atol=1e-12)
    # Queries land in the leaf their bin selects.
    assert predict(model, np.array([[0.5]]))[0] == pytest.approx(0.0, abs=1e-12)
    assert predict(model, np.array([[50.0]]))[0] == pytest.approx(10.0, abs=1e-12)


def test_training_mse_non_increasing_in_trees(rng):
    X = rng.normal(size=(80, 5))
    y = 2 * X[:, 0] - X[:, 1] ** 2 + rng.normal(scale=0.5, size=80)
    base = LearnerConfig("GBT", {"max_depth": 3, "learning_rate": 0.1, "n_bins": 16})
    previous = np.inf
    for n_trees in (0, 1, 2, 5, 10, 20, 40):
        model = train_xy(base.with_params(n_trees=n_trees), X, y, seed=0)
        mse = float(np.mean((predict(model, X) - y) ** 2))
        assert mse <= previous + 1e-12
        previous = mse
    assert previous < float(np.var(y))  # boosting actually learned something


def test_prefix_of_trees_agrees_with_smaller_model(rng):
    # Stagewise fits depend only on earlier stages, so model(n) extends model(k).
    X = rng.normal(size=(40, 3))
    y = rng.normal(size=40)
    small = fit(X, y, n_trees=5, max_depth=3)
    large = fit(X, y, n_trees=12, max_depth=3)
    Q = rng.normal(size=(10, 3))
    partial = np.full(len(Q), large.state.base)
    from scenariolab.learners.boosting import _bin_indices, _predict_binned

    binned = _bin_indices(Q, large.state.lo, large.state.width, large.state.n_bins)
    for tree in large.state.trees[:5]:
        partial += large.state.learning_rate * _predict_binned(tree, binned)
    assert np.allclose(partial, predict(small, Q), atol=1e-12)


def test_constant_feature_is_never_split(rng):
    X = np.column_stack([np.full(30, 2.5), rng.normal(size=30)])
    y = rng.normal(size=30)
    model = fit(X, y, n_trees=10, max_depth=3)

    def features_used(node, out):
        if not node.is_leaf:
            out.add(node.feature)
            features_used(node.left, out)
            features_used(node.right, out)
        return out

    used = set()
    for tree in model.state.trees:
        features_used(tree, used)
    assert 0 not in used


def test_more_bins_refine_fit(rng):
    X = rng.uniform(0, 1, size=(200, 1))
    y = np.sin(8 * X[:, 0])
    coarse = fit(X, y, n_trees=30, max_depth=4, learning_rate=0.3, n_bins=2)
    fine = fit(X, y, n_trees=30, max_depth=4, learning_rate=0.3, n_bins=64)
    mse_coarse = float(np.mean((predict(coarse, X) - y) ** 2))
    mse_fine = float(np.mean((predict(fine, X) - y) ** 2))
    assert mse_fine < mse_coarse


def test_seed_free(rng):
    X = rng.normal(size=(25, 2))
    y = rng.normal(size=25)
    Q = rng.normal(size=(6, 2))
    a = predict(train_xy(LearnerConfig("GBT"), X, y, seed=1), Q)
    b = predict(train_xy(LearnerConfig("GBT"), X, y, seed=2), Q)
    assert np.array_equal(a, b)

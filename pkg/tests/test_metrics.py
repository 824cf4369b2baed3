import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from scenariolab import (
    absolute_error,
    evaluate,
    pearson_matrix,
    relative_error,
    rmse,
    spearman_rho,
)
from scenariolab.errors import (
    AllExcludedError,
    NoOverlapError,
    ShapeError,
    UndefinedCorrelationError,
)
from scenariolab.metrics import reports_close

import oracles
from conftest import make_dataset, make_repo

finite_vec = st.lists(
    st.floats(min_value=-1e6, max_value=1e6, allow_nan=False), min_size=1, max_size=40
)


def test_absolute_error_examples():
    assert absolute_error([1, 2], [1, 2]) == (0, 0, 0)
    assert absolute_error([9], [10]) == (1, 0, 0)
    value, std, var = absolute_error([1, 3], [2, 6])
    assert (value, std, var) == (2.0, 1.0, 1.0)


def test_relative_error_examples():
    stat, excluded = relative_error([9], [10])
    assert stat.value == pytest.approx(0.1, abs=1e-15)
    assert excluded == 0

    stat, _ = relative_error([9, 22], [10, 20])
    assert stat.value == pytest.approx(0.1, abs=1e-15)
    assert stat.stddev == pytest.approx(0.0, abs=1e-15)

    stat, excluded = relative_error([5, 9], [0, 10])
    assert stat.value == pytest.approx(0.1, abs=1e-15)
    assert excluded == 1


def test_relative_error_all_excluded():
    with pytest.raises(AllExcludedError):
        relative_error([1, 2], [0, 0])


def test_rmse_examples():
    assert rmse([1, 2, 3], [1, 2, 3]).value == 0
    assert rmse([1, 2], [1, 4]).value == pytest.approx(math.sqrt(2), abs=1e-15)
    assert rmse([3], [0]).value == 3


def test_shape_mismatch():
    with pytest.raises(ShapeError):
        absolute_error([1, 2], [1])
    with pytest.raises(ShapeError):
        rmse([], [])


def test_spearman_monotone_and_reversed():
    assert spearman_rho([1, 2, 3], [10, 20, 30]) == pytest.approx(1.0, abs=1e-15)
    assert spearman_rho([3, 2, 1], [10, 20, 30]) == pytest.approx(-1.0, abs=1e-15)


def test_spearman_with_ties_matches_rank_table():
    pred = [1, 2, 2, 3]
    actual = [1, 2, 3, 4]
    expected = oracles.spearman(pred, actual)
    assert spearman_rho(pred, actual) == pytest.approx(expected, abs=1e-12)


def test_spearman_undefined_for_constant():
    with pytest.raises(UndefinedCorrelationError):
        spearman_rho([5, 5, 5], [1, 2, 3])


def test_metrics_match_bruteforce(rng):
    for _ in range(100):
        n = int(rng.integers(2, 60))
        pred = rng.normal(scale=10, size=n)
        actual = rng.normal(scale=10, size=n)
        ov, os_, ovar = oracles.abs_error(pred, actual)
        stat = absolute_error(pred, actual)
        assert stat.value == pytest.approx(ov, rel=1e-12, abs=1e-12)
        assert stat.stddev == pytest.approx(os_, rel=1e-12, abs=1e-12)
        assert stat.variance == pytest.approx(ovar, rel=1e-12, abs=1e-12)

        rv, rs, rvar, rexcl = oracles.rel_error(pred, actual, 1e-9)
        stat, excluded = relative_error(pred, actual)
        assert stat.value == pytest.approx(rv, rel=1e-12, abs=1e-12)
        assert excluded == rexcl

        mv, ms, mvar = oracles.rmse(pred, actual)
        stat = rmse(pred, actual)
        assert stat.value == pytest.approx(mv, rel=1e-12, abs=1e-12)
        assert stat.stddev == pytest.approx(ms, rel=1e-12, abs=1e-9)

        assert spearman_rho(pred, actual) == pytest.approx(
            oracles.spearman(pred, actual), rel=1e-12, abs=1e-12
        )


@given(pred=finite_vec, actual=finite_vec)
def test_rmse_at_least_ae(pred, actual):
    n = min(len(pred), len(actual))
    pred, actual = pred[:n], actual[:n]
    assert rmse(pred, actual).value >= absolute_error(pred, actual).value - 1e-12


@given(pred=finite_vec, actual=finite_vec, c=st.floats(-1e5, 1e5, allow_nan=False))
def test_translation_invariance(pred, actual, c):
    n = min(len(pred), len(actual))
    pred = np.array(pred[:n])
    actual = np.array(actual[:n])
    base_ae = absolute_error(pred, actual).value
    base_rmse = rmse(pred, actual).value
    shifted_ae = absolute_error(pred + c, actual + c).value
    shifted_rmse = rmse(pred + c, actual + c).value
    assert shifted_ae == pytest.approx(base_ae, rel=1e-9, abs=1e-6)
    assert shifted_rmse == pytest.approx(base_rmse, rel=1e-9, abs=1e-6)


def test_spearman_invariant_under_increasing_transforms(rng):
    for _ in range(20):
        n = int(rng.integers(2, 30))
        pred = np.round(rng.normal(scale=5, size=n), 6)
        actual = np.round(rng.normal(scale=5, size=n), 6)
        if len(set(pred)) < 2 or len(set(actual)) < 2:
            continue
        base = spearman_rho(pred, actual)
        assert abs(spearman_rho(np.exp(pred / 10), actual) - base) <= 1e-12
        assert abs(spearman_rho(pred, 3.5 * actual + 11) - base) <= 1e-12


def test_evaluate_report_fields():
    report = evaluate([1.0, 2.0, 3.0], [1.0, 2.5, 2.0])
    assert report.n_used == {"AE": 3, "RE": 3, "RMSE": 3}
    assert report.n_excluded_re == 0
    assert report.rmse.variance == pytest.approx(report.rmse.stddev**2, abs=1e-12)
    assert -1 <= report.spearman <= 1
    assert reports_close(report, evaluate([1.0, 2.0, 3.0], [1.0, 2.5, 2.0]))


def test_evaluate_handles_undefined_spearman():
    report = evaluate([2.0, 2.0, 2.0], [1.0, 2.0, 3.0])
    assert report.spearman is None


def test_pearson_matrix_trivials():
    x = np.arange(10.0)
    repo = make_repo(
        make_dataset("a", {"v": x}),
        make_dataset("b", {"v": 2 * x + 3}),
        make_dataset("c", {"v": -x}),
    )
    m = pearson_matrix(repo, "v", ["a", "b", "c"])
    assert np.allclose(np.diag(m.entries), 1.0)
    assert m.entries[0, 1] == pytest.approx(1.0, abs=1e-12)
    assert m.entries[0, 2] == pytest.approx(-1.0, abs=1e-12)
    assert np.array_equal(m.entries, m.entries.T)
    assert m.n_common[0, 1] == 10


def test_pearson_matrix_aligns_on_shared_attribute_dates():
    from datetime import date

    a = make_dataset("a", {"v": [1.0, 2.0, 3.0, 4.0]}, start=date(2016, 1, 1))
    b = make_dataset(
        "b", {"v": [2.0, np.nan, 6.0, 8.0]}, start=date(2016, 1, 1)
    )
    m = pearson_matrix(make_repo(a, b), "v", ["a", "b"])
    assert m.n_common[0, 1] == 3  # the NaN date drops out
    assert m.entries[0, 1] == pytest.approx(1.0, abs=1e-12)


def test_pearson_matrix_insufficient_overlap_names_pair():
    from datetime import date

    a = make_dataset("a", {"v": [1.0, 2.0]}, start=date(2016, 1, 1))
    b = make_dataset("b", {"v": [1.0, 2.0]}, start=date(2020, 1, 1))
    with pytest.raises(NoOverlapError, match="'a' and 'b'"):
        pearson_matrix(make_repo(a, b), "v", ["a", "b"])

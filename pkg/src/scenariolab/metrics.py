"""Performance measures: AE, RE, RMSE, Spearman rho, Pearson matrices.

Each error measure reports (value, stddev, variance) where the spread is
the population statistic of the per-example terms: absolute deviations for
AE, relative deviations for RE, squared deviations for RMSE. Relative error
skips examples whose actual value is within eps of zero and reports how
many were skipped.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .dataset import DataRepository
from .errors import (
    AllExcludedError,
    MeasureError,
    NoOverlapError,
    NonFiniteDataError,
    ShapeError,
    UndefinedCorrelationError,
)

DEFAULT_EPS_RE = 1e-9


class MetricStat(NamedTuple):
    value: float
    stddev: float
    variance: float


def _check_pair(pred, actual, min_len=1):
    pred = np.asarray(pred, dtype=np.float64).ravel()
    actual = np.asarray(actual, dtype=np.float64).ravel()
    if len(pred) != len(actual):
        raise ShapeError(f"pred has {len(pred)} entries, actual has {len(actual)}")
    if len(pred) < min_len:
        raise ShapeError(f"need at least {min_len} entries, got {len(pred)}")
    if not (np.isfinite(pred).all() and np.isfinite(actual).all()):
        raise NonFiniteDataError("metric inputs must be finite")
    return pred, actual


def _stat(terms: np.ndarray) -> MetricStat:
    mean = float(terms.mean())
    var = float(((terms - mean) ** 2).mean())
    return MetricStat(mean, float(np.sqrt(var)), var)


def absolute_error(pred, actual) -> MetricStat:
    """Mean absolute deviation of the prediction from the actual value."""
    pred, actual = _check_pair(pred, actual)
    return _stat(np.abs(pred - actual))


def relative_error(
    pred, actual, eps: float = DEFAULT_EPS_RE
) -> tuple[MetricStat, int]:
    """Mean of |pred - actual| / |actual|, skipping near-zero actuals.

    Returns the statistic plus the count of excluded examples.
    """
    if eps <= 0:
        raise ValueError("eps must be > 0")
    pred, actual = _check_pair(pred, actual)
    keep = np.abs(actual) >= eps
    n_excluded = int((~keep).sum())
    if not keep.any():
        raise AllExcludedError(
            f"all {len(actual)} actual values are within {eps} of zero"
        )
    terms = np.abs(pred[keep] - actual[keep]) / np.abs(actual[keep])
    return _stat(terms), n_excluded


def rmse(pred, actual) -> MetricStat:
    """Root of the mean squared error; spread taken over the squared terms."""
    pred, actual = _check_pair(pred, actual)
    sq = (pred - actual) ** 2
    mean = float(sq.mean())
    var = float(((sq - mean) ** 2).mean())
    return MetricStat(float(np.sqrt(mean)), float(np.sqrt(var)), var)


def _fractional_ranks(v: np.ndarray) -> np.ndarray:
    """1-based ranks; tied values share the average of their rank run."""
    order = np.argsort(v, kind="stable")
    sv = v[order]
    ranks = np.empty(len(v), dtype=np.float64)
    i = 0
    while i < len(sv):
        j = i
        while j + 1 < len(sv) and sv[j + 1] == sv[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j + 2) / 2.0
        i = j + 1
    return ranks


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    xc = x - x.mean()
    yc = y - y.mean()
    sx = float(np.sqrt((xc * xc).sum()))
    sy = float(np.sqrt((yc * yc).sum()))
    if sx == 0.0 or sy == 0.0:
        raise UndefinedCorrelationError("zero variance on one side")
    r = float((xc * yc).sum() / (sx * sy))
    # Float noise can push a perfect correlation an ulp past +-1.
    return max(-1.0, min(1.0, r))


def spearman_rho(pred, actual) -> float:
    """Rank correlation: Pearson on fractional (tie-averaged) ranks."""
    pred, actual = _check_pair(pred, actual, min_len=2)
    try:
        return _pearson(_fractional_ranks(pred), _fractional_ranks(actual))
    except UndefinedCorrelationError:
        raise UndefinedCorrelationError(
            "rank correlation undefined: constant predictions or actuals"
        ) from None


@dataclass(frozen=True)
class MetricReport:
    """All measures for one prediction/actual pair.

    spearman is None when rank correlation is undefined (constant side).
    """

    ae: MetricStat
    re: MetricStat
    rmse: MetricStat
    spearman: float | None
    n_used: dict
    n_excluded_re: int

    def measure(self, name: str) -> MetricStat:
        key = name.lower()
        if key not in ("ae", "re", "rmse"):
            raise MeasureError(f"unknown measure {name!r}; expected AE, RE or RMSE")
        return getattr(self, key)


def evaluate(pred, actual, eps_re: float = DEFAULT_EPS_RE) -> MetricReport:
    """Compute the full report for one prediction/actual pair."""
    pred, actual = _check_pair(pred, actual)
    ae = absolute_error(pred, actual)
    re, n_excluded = relative_error(pred, actual, eps_re)
    rm = rmse(pred, actual)
    try:
        rho = spearman_rho(pred, actual) if len(pred) >= 2 else None
    except UndefinedCorrelationError:
        rho = None
    n = len(pred)
    return MetricReport(
        ae=ae,
        re=re,
        rmse=rm,
        spearman=rho,
        n_used={"AE": n, "RE": n - n_excluded, "RMSE": n},
        n_excluded_re=n_excluded,
    )


def reports_close(a: MetricReport, b: MetricReport, tol: float = 1e-12) -> bool:
    """True when two reports agree within tol on every numeric field."""
    for name in ("ae", "re", "rmse"):
        for u, v in zip(a.measure(name), b.measure(name)):
            if abs(u - v) > tol:
                return False
    if (a.spearman is None) != (b.spearman is None):
        return False
    if a.spearman is not None and abs(a.spearman - b.spearman) > tol:
        return False
    return a.n_excluded_re == b.n_excluded_re and a.n_used == b.n_used


@dataclass(frozen=True)
class CorrelationMatrix:
    """Symmetric Pearson matrix over sources sharing one attribute."""

    source_ids: tuple[str, ...]
    entries: np.ndarray
    n_common: np.ndarray

    def __post_init__(self):
        self.entries.setflags(write=False)
        self.n_common.setflags(write=False)


def pearson_matrix(
    repo: DataRepository, attribute: str, source_ids: list[str]
) -> CorrelationMatrix:
    """Pairwise Pearson correlation of one attribute across sources.

    Each pair aligns on the dates where both sources have the attribute
    present; pairs sharing fewer than two dates raise NoOverlapError.
    """
    series = {}
    for sid in source_ids:
        ds = repo[sid]
        col = ds.column(attribute)
        series[sid] = {
            d: v for d, v in zip(ds.dates, col) if not np.isnan(v)
        }

    k = len(source_ids)
    entries = np.eye(k)
    n_common = np.zeros((k, k), dtype=np.int64)
    for i, a in enumerate(source_ids):
        n_common[i, i] = len(series[a])
        for j in range(i + 1, k):
            b = source_ids[j]
            shared = sorted(set(series[a]) & set(series[b]))
            if len(shared) < 2:
                raise NoOverlapError(
                    f"sources {a!r} and {b!r} share {len(shared)} dates with "
                    f"attribute {attribute!r}; need at least 2"
                )
            x = np.array([series[a][d] for d in shared])
            y = np.array([series[b][d] for d in shared])
            r = _pearson(x, y)
            entries[i, j] = entries[j, i] = r
            n_common[i, j] = n_common[j, i] = len(shared)
    return CorrelationMatrix(tuple(source_ids), entries, n_common)

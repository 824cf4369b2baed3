"""Assemble scenario attributes into one table and window it for learning.

Windowing turns the aligned series into supervised examples: the features
of the example predicted at position t are all columns' values at positions
t-1 .. t-w, so every feature strictly precedes the prediction date. The
split is chronological; shuffling would leak future values into training.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date

import numpy as np

from .dataset import DataRepository, common_date_index
from .errors import SeriesTooShortError, SplitError
from .scenario import AttributeRef, ScenarioSpec


@dataclass(frozen=True)
class AssembledTable:
    """Scenario attributes joined on their common complete date index."""

    dates: tuple[date, ...]
    columns: tuple[tuple[AttributeRef, np.ndarray], ...]
    target_column: int

    def __post_init__(self):
        n = len(self.dates)
        for ref, series in self.columns:
            if len(series) != n:
                raise ValueError(f"column {ref} has {len(series)} values, expected {n}")
            series.setflags(write=False)
        if not 0 <= self.target_column < len(self.columns):
            raise ValueError("target_column out of range")

    @property
    def n_rows(self) -> int:
        return len(self.dates)

    def prefix(self, k: int) -> "AssembledTable":
        return AssembledTable(
            dates=self.dates[:k],
            columns=tuple((ref, series[:k].copy()) for ref, series in self.columns),
            target_column=self.target_column,
        )


@dataclass(frozen=True)
class WindowedTable:
    """Lagged feature matrix plus aligned target vector and dates."""

    feature_names: tuple[str, ...]
    X: np.ndarray
    y: np.ndarray
    example_dates: tuple[date, ...]
    window: int
    horizon: int = 1

    def __post_init__(self):
        if not (len(self.X) == len(self.y) == len(self.example_dates)):
            raise ValueError("X, y and example_dates must have equal lengths")
        if self.X.shape[1] != len(self.feature_names):
            raise ValueError("feature count must match feature_names")
        self.X.setflags(write=False)
        self.y.setflags(write=False)

    @property
    def n_examples(self) -> int:
        return len(self.y)

    def take(self, start: int, stop: int) -> "WindowedTable":
        return WindowedTable(
            feature_names=self.feature_names,
            X=self.X[start:stop].copy(),
            y=self.y[start:stop].copy(),
            example_dates=self.example_dates[start:stop],
            window=self.window,
            horizon=self.horizon,
        )


def assemble(repo: DataRepository, spec: ScenarioSpec) -> AssembledTable:
    """Join the scenario's attributes on their common complete date index.

    Column order is main attributes, then context, then collaborative
    sources in scenario order. Dates with a missing value in any selected
    attribute are dropped (strict inner join, no imputation).
    """
    refs = spec.all_attributes()
    by_source: dict[str, list[str]] = {}
    for ref in refs:
        by_source.setdefault(ref.source_id, []).append(ref.attribute)

    projected = {
        sid: repo[sid].select(attrs) for sid, attrs in by_source.items()
    }
    index = common_date_index(list(projected.values()))

    row_maps = {
        sid: {d: i for i, d in enumerate(ds.dates)} for sid, ds in projected.items()
    }
    columns = []
    for ref in refs:
        ds = projected[ref.source_id]
        rows = [row_maps[ref.source_id][d] for d in index]
        columns.append((ref, ds.column(ref.attribute)[rows]))

    return AssembledTable(
        dates=index,
        columns=tuple(columns),
        target_column=refs.index(spec.target),
    )


def window(table: AssembledTable, w: int) -> WindowedTable:
    """Convert the aligned table into supervised examples with window w.

    One example per position t in [w, n-1]: features are all columns'
    values at t-1 .. t-w (lag-1 block first, columns in table order within
    a block), target is the target column's value at t.
    """
    if w < 1:
        raise ValueError("window must be >= 1")
    n = table.n_rows
    if n <= w:
        raise SeriesTooShortError(
            f"need more than {w} aligned rows, have {n}", needed=w + 1, have=n
        )

    series = np.column_stack([col for _, col in table.columns])
    m = n - w
    blocks = [series[w - lag : w - lag + m] for lag in range(1, w + 1)]
    X = np.hstack(blocks)
    y = series[w:, table.target_column].copy()

    feature_names = tuple(
        f"{ref}.lag{lag}" for lag in range(1, w + 1) for ref, _ in table.columns
    )
    return WindowedTable(
        feature_names=feature_names,
        X=np.ascontiguousarray(X),
        y=y,
        example_dates=table.dates[w:],
        window=w,
    )


def chronological_split(
    wt: WindowedTable, train_fraction: float
) -> tuple[WindowedTable, WindowedTable]:
    """First floor(train_fraction * m) examples train, remainder test."""
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must be in (0, 1)")
    m = wt.n_examples
    n_train = int(np.floor(train_fraction * m))
    if n_train < 1 or n_train >= m:
        raise SplitError(
            f"split fraction {train_fraction} over {m} examples leaves an empty side"
        )
    return wt.take(0, n_train), wt.take(n_train, m)

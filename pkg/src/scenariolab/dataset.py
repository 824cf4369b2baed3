"""Loading and aligning per-location time-series datasets.

Each source lives in one delimiter-separated text file: first column
``date`` (ISO-8601 calendar days), remaining columns numeric attributes.
Empty cells and the literal ``?`` both mean "missing". Loaded datasets are
immutable; a populated repository is safe to share across threads.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path

import numpy as np

from .errors import (
    CellParseError,
    DateFormatError,
    DuplicateDateError,
    NoOverlapError,
    ParseError,
    UnresolvedRefError,
)

MISSING_MARKERS = ("", "?")


@dataclass(frozen=True)
class SourceDataset:
    """One location's dated attribute table.

    ``values`` is an (n_rows, n_attributes) float array; missing cells are
    NaN. Dates are strictly increasing.
    """

    source_id: str
    dates: tuple[date, ...]
    attribute_names: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        n, k = self.values.shape
        if n != len(self.dates):
            raise ValueError("values row count must match number of dates")
        if k != len(self.attribute_names):
            raise ValueError("values column count must match attribute names")
        if n < 2:
            raise ParseError(f"dataset {self.source_id!r} has {n} rows, need at least 2")
        if len(set(self.attribute_names)) != k:
            raise ParseError(f"dataset {self.source_id!r} has duplicate attribute names")
        if any(b <= a for a, b in zip(self.dates, self.dates[1:])):
            raise ValueError("dates must be strictly increasing")
        self.values.setflags(write=False)

    @property
    def n_rows(self) -> int:
        return len(self.dates)

    @property
    def date_span(self) -> tuple[date, date]:
        return self.dates[0], self.dates[-1]

    def column(self, attribute: str) -> np.ndarray:
        if attribute not in self.attribute_names:
            raise UnresolvedRefError(
                f"source {self.source_id!r} has no attribute {attribute!r}"
            )
        return self.values[:, self.attribute_names.index(attribute)]

    def select(self, attributes) -> "SourceDataset":
        """Project onto a subset of attributes (order as given)."""
        cols = [self.attribute_names.index(a) if a in self.attribute_names else None
                for a in attributes]
        missing = [a for a, c in zip(attributes, cols) if c is None]
        if missing:
            raise UnresolvedRefError(
                f"source {self.source_id!r} has no attribute(s) {missing}"
            )
        return SourceDataset(
            source_id=self.source_id,
            dates=self.dates,
            attribute_names=tuple(attributes),
            values=self.values[:, cols].copy(),
        )

    def complete_dates(self) -> set[date]:
        """Dates whose row has no missing value in any attribute."""
        ok = ~np.isnan(self.values).any(axis=1)
        return {d for d, keep in zip(self.dates, ok) if keep}

    def __eq__(self, other):
        if not isinstance(other, SourceDataset):
            return NotImplemented
        return (
            self.source_id == other.source_id
            and self.dates == other.dates
            and self.attribute_names == other.attribute_names
            and np.array_equal(self.values, other.values, equal_nan=True)
        )

    def __hash__(self):
        return hash((self.source_id, self.dates, self.attribute_names))


@dataclass(frozen=True)
class ManifestEntry:
    source_id: str
    path: str
    n_rows: int
    first_date: date
    last_date: date


@dataclass
class DataRepository:
    """Immutable collection of loaded datasets plus load provenance."""

    datasets: dict[str, SourceDataset] = field(default_factory=dict)
    manifest: list[ManifestEntry] = field(default_factory=list)

    def __getitem__(self, source_id: str) -> SourceDataset:
        try:
            return self.datasets[source_id]
        except KeyError:
            raise UnresolvedRefError(
                f"unknown source {source_id!r}; loaded sources: {sorted(self.datasets)}"
            ) from None

    def __contains__(self, source_id: str) -> bool:
        return source_id in self.datasets

    @property
    def source_ids(self) -> list[str]:
        return list(self.datasets)

    def add(self, dataset: SourceDataset, path: str = "<memory>"):
        if dataset.source_id in self.datasets:
            raise ParseError(f"duplicate source_id {dataset.source_id!r}")
        self.datasets[dataset.source_id] = dataset
        self.manifest.append(
            ManifestEntry(
                source_id=dataset.source_id,
                path=path,
                n_rows=dataset.n_rows,
                first_date=dataset.dates[0],
                last_date=dataset.dates[-1],
            )
        )


def _parse_cell(text: str, row: int, column: str) -> float:
    text = text.strip()
    if text in MISSING_MARKERS:
        return float("nan")
    try:
        return float(text)
    except ValueError:
        raise CellParseError(
            f"row {row}, column {column!r}: cannot parse {text!r} as a number",
            row=row,
            column=column,
        ) from None


def load_dataset(path, source_id: str, delimiter: str = ",") -> SourceDataset:
    """Load one source file into a dataset sorted by ascending date.

    Row numbers in errors are 1-based data rows (the header is row 0).
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if len(header) < 2:
            raise ParseError(f"{path}: need a date column plus at least one attribute")
        attribute_names = tuple(header[1:])

        dates: list[date] = []
        rows: list[list[float]] = []
        seen: dict[date, int] = {}
        for i, raw in enumerate(reader, start=1):
            if not raw or all(not c.strip() for c in raw):
                continue
            if len(raw) != len(header):
                raise CellParseError(
                    f"row {i}: expected {len(header)} cells, got {len(raw)}", row=i
                )
            try:
                d = date.fromisoformat(raw[0].strip())
            except ValueError:
                raise DateFormatError(
                    f"row {i}: cannot parse date {raw[0].strip()!r} (expected YYYY-MM-DD)",
                    row=i,
                ) from None
            if d in seen:
                raise DuplicateDateError(
                    f"row {i}: date {d.isoformat()} already appeared at row {seen[d]}",
                    row=i,
                )
            seen[d] = i
            dates.append(d)
            rows.append([_parse_cell(c, i, a) for c, a in zip(raw[1:], attribute_names)])

    if len(rows) < 2:
        raise ParseError(f"{path}: dataset has {len(rows)} rows, need at least 2")

    order = np.argsort(np.array([d.toordinal() for d in dates]))
    values = np.asarray(rows, dtype=np.float64)[order]
    return SourceDataset(
        source_id=source_id,
        dates=tuple(dates[j] for j in order),
        attribute_names=attribute_names,
        values=values,
    )


def write_dataset(dataset: SourceDataset, path, delimiter: str = ","):
    """Write a dataset back to file; reloading yields an equal dataset."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, delimiter=delimiter)
        writer.writerow(["date", *dataset.attribute_names])
        for d, row in zip(dataset.dates, dataset.values):
            writer.writerow(
                [d.isoformat()] + ["" if np.isnan(v) else repr(float(v)) for v in row]
            )


def load_repository(directory, delimiter: str = ",") -> DataRepository:
    """Load every regular file in a directory; source_id = file stem."""
    directory = Path(directory)
    if not directory.is_dir():
        raise ParseError(f"{directory}: not a directory")
    repo = DataRepository()
    files = sorted(p for p in directory.iterdir() if p.is_file())
    if not files:
        raise ParseError(f"{directory}: no datasets found")
    for p in files:
        repo.add(load_dataset(p, p.stem, delimiter=delimiter), path=str(p))
    return repo


def common_date_index(datasets: list[SourceDataset]) -> tuple[date, ...]:
    """Sorted intersection of complete dates across all given datasets.

    A date qualifies only if every dataset has a row for it with no missing
    value in any of its attributes.
    """
    if not datasets:
        raise ValueError("need at least one dataset")
    common = datasets[0].complete_dates()
    for ds in datasets[1:]:
        common &= ds.complete_dates()
    if not common:
        spans = "; ".join(
            f"{ds.source_id}={ds.dates[0].isoformat()}..{ds.dates[-1].isoformat()}"
            f" ({ds.n_rows} rows)"
            for ds in datasets
        )
        raise NoOverlapError(f"no common complete dates across datasets: {spans}")
    return tuple(sorted(common))

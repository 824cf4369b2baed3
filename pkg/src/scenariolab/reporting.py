"""Result store, persistence, and the ranked/tabular report views.

A results directory is plain line-oriented text so diffs stay readable:

    index                 run-level index: config snapshot plus one row per cell
    cells/<scenario>__<location>__<algorithm>.csv
                          per-cell metrics (comment header) and predictions
    reports/              summary/spearman/dispersion/series files on demand

Floats are written with 12 significant digits and every ordering is fixed,
so re-emitting the same store is byte-identical. Wall-clock data (cell
timings, store timestamps) stays in memory only; persisting it would break
reproducible output directories.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path

import numpy as np

from .errors import (
    CellNotFoundError,
    MeasureError,
    ParseError,
    ShapeError,
    UndefinedCorrelationError,
)
from .metrics import MetricReport, MetricStat, _pearson, spearman_rho
from .runner import CellResult, EvaluationRecord, FailedCell

MEASURES = ("AE", "RE", "RMSE", "SPEARMAN")
GROUP_KEYS = ("algorithm", "location", "scenario")


def fmt(x) -> str:
    """Canonical 12-significant-digit rendering; None becomes NA."""
    if x is None:
        return "NA"
    return format(float(x), ".12g")


@dataclass
class ResultStore:
    """Immutable snapshot of a suite run's records, indexed by cell key."""

    records: list[EvaluationRecord]
    failures: list[FailedCell] = field(default_factory=list)
    config_snapshot: dict = field(default_factory=dict)
    created_at: float = field(default_factory=time.time)

    def __post_init__(self):
        self._index = {}
        for r in self.records:
            key = (r.scenario_id, r.location, r.algorithm)
            if key in self._index:
                raise ValueError(f"duplicate cell key {key}")
            self._index[key] = r

    @classmethod
    def from_results(cls, results: list[CellResult], config_snapshot=None):
        return cls(
            records=[r for r in results if isinstance(r, EvaluationRecord)],
            failures=[r for r in results if isinstance(r, FailedCell)],
            config_snapshot=config_snapshot or {},
        )

    def get(self, scenario_id: str, location: str, algorithm: str) -> EvaluationRecord:
        try:
            return self._index[(scenario_id, location, algorithm)]
        except KeyError:
            raise CellNotFoundError(
                f"no cell ({scenario_id!r}, {location!r}, {algorithm!r}); "
                f"have {sorted(self._index)}"
            ) from None

    @property
    def n_cells(self) -> int:
        return len(self.records) + len(self.failures)


# ---------------------------------------------------------------------------
# persistence

def _cell_filename(r: EvaluationRecord) -> str:
    return f"{r.scenario_id}__{r.location}__{r.algorithm}.csv"


def _write_cell(r: EvaluationRecord, path: Path):
    lines = [
        f"# scenario_id={r.scenario_id}",
        f"# label={r.scenario_label}",
        f"# location={r.location}",
        f"# algorithm={r.algorithm}",
        f"# seed={r.seed}",
        f"# params={json.dumps(r.params, sort_keys=True)}",
    ]
    rep = r.report
    for name in ("AE", "RE", "RMSE"):
        stat = rep.measure(name)
        parts = [fmt(stat.value), fmt(stat.stddev), fmt(stat.variance),
                 str(rep.n_used[name])]
        if name == "RE":
            parts.append(str(rep.n_excluded_re))
        lines.append(f"# metric.{name}={','.join(parts)}")
    lines.append(f"# metric.SPEARMAN={fmt(rep.spearman)}")
    lines.append("date,actual,predicted")
    for d, actual, predicted in r.predictions:
        lines.append(f"{d.isoformat()},{fmt(actual)},{fmt(predicted)}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _read_cell(path: Path) -> EvaluationRecord:
    meta = {}
    predictions = []
    with path.open(encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                key, sep, value = line.lstrip("# ").partition("=")
                if not sep:
                    raise ParseError(f"{path}: malformed header line {line!r}")
                meta[key] = value
            elif line.startswith("date,"):
                continue
            else:
                ds, a, p = line.split(",")
                predictions.append((date.fromisoformat(ds), float(a), float(p)))

    def stat(name):
        parts = meta[f"metric.{name}"].split(",")
        return MetricStat(float(parts[0]), float(parts[1]), float(parts[2])), parts

    ae, ae_parts = stat("AE")
    re, re_parts = stat("RE")
    rm, rm_parts = stat("RMSE")
    rho_text = meta["metric.SPEARMAN"]
    report = MetricReport(
        ae=ae,
        re=re,
        rmse=rm,
        spearman=None if rho_text == "NA" else float(rho_text),
        n_used={"AE": int(ae_parts[3]), "RE": int(re_parts[3]), "RMSE": int(rm_parts[3])},
        n_excluded_re=int(re_parts[4]),
    )
    return EvaluationRecord(
        scenario_id=meta["scenario_id"],
        scenario_label=meta["label"],
        location=meta["location"],
        algorithm=meta["algorithm"],
        params=json.loads(meta["params"]),
        report=report,
        predictions=tuple(predictions),
        timing_s=0.0,
        seed=int(meta["seed"]),
    )


def save_store(store: ResultStore, out_dir) -> Path:
    """Write the store as a results directory (index + one file per cell)."""
    out = Path(out_dir)
    cells = out / "cells"
    cells.mkdir(parents=True, exist_ok=True)
    (out / "reports").mkdir(exist_ok=True)

    index_lines = [
        "# scenariolab results v1",
        f"# config={json.dumps(store.config_snapshot, sort_keys=True)}",
        "status,scenario_id,label,location,algorithm,detail",
    ]
    for r in store.records:
        name = _cell_filename(r)
        _write_cell(r, cells / name)
        index_lines.append(
            f"ok,{r.scenario_id},{r.scenario_label},{r.location},"
            f"{r.algorithm},cells/{name}"
        )
    for f in store.failures:
        detail = f"{f.error_type}: {f.message}".replace("\n", " ").replace(",", ";")
        index_lines.append(
            f"failed,{f.scenario_id},{f.scenario_label},{f.location},"
            f"{f.algorithm},{detail}"
        )
    (out / "index").write_text("\n".join(index_lines) + "\n", encoding="utf-8")
    return out


def load_store(results_dir) -> ResultStore:
    """Read a results directory back into a store (timings are not kept)."""
    out = Path(results_dir)
    index = out / "index"
    if not index.is_file():
        raise ParseError(f"{out}: no index file; not a results directory")
    records, failures = [], []
    config = {}
    for line in index.read_text(encoding="utf-8").splitlines():
        if line.startswith("# config="):
            config = json.loads(line.partition("=")[2])
            continue
        if line.startswith("#") or line.startswith("status,") or not line.strip():
            continue
        status, scenario_id, label, location, algorithm, detail = line.split(",", 5)
        if status == "ok":
            records.append(_read_cell(out / detail))
        else:
            error_type, _, message = detail.partition(": ")
            failures.append(
                FailedCell(
                    scenario_id=scenario_id,
                    scenario_label=label,
                    location=location,
                    algorithm=algorithm,
                    error_type=error_type,
                    message=message,
                )
            )
    return ResultStore(records=records, failures=failures, config_snapshot=config)


# ---------------------------------------------------------------------------
# report views

@dataclass
class RankingTable:
    group_by: str
    measure: str
    rows: list[tuple[int, str, float | None, int]]  # (rank, key, mean, n_cells)


def _group_key(record: EvaluationRecord, group_by: str) -> str:
    if group_by == "algorithm":
        return record.algorithm
    if group_by == "location":
        return record.location
    if group_by == "scenario":
        return record.scenario_id
    raise ValueError(f"group_by must be one of {GROUP_KEYS}, got {group_by!r}")


def _cell_measure(record: EvaluationRecord, measure: str) -> float | None:
    if measure == "SPEARMAN":
        return record.report.spearman
    return record.report.measure(measure).value


def summarize(store: ResultStore, group_by: str, measure: str) -> RankingTable:
    """Mean of a measure per group, ranked best first.

    Errors rank ascending, Spearman descending. Cells with an undefined
    Spearman are skipped; a group with no defined cells ranks last with a
    NA mean. Equal means share a dense rank.
    """
    measure = measure.upper()
    if measure not in MEASURES:
        raise MeasureError(f"unknown measure {measure!r}; expected one of {MEASURES}")
    if not store.records:
        raise ValueError("store has no successful cells to summarize")

    order: list[str] = []
    groups: dict[str, list[float]] = {}
    sizes: dict[str, int] = {}
    for r in store.records:
        key = _group_key(r, group_by)
        if key not in groups:
            order.append(key)
            groups[key] = []
            sizes[key] = 0
        sizes[key] += 1
        value = _cell_measure(r, measure)
        if value is not None:
            groups[key].append(value)

    means = {
        key: (float(np.mean(vals)) if vals else None) for key, vals in groups.items()
    }
    descending = measure == "SPEARMAN"

    def sort_key(key):
        mean = means[key]
        if mean is None:
            return (1, 0.0, order.index(key))
        return (0, -mean if descending else mean, order.index(key))

    ranked = sorted(order, key=sort_key)
    rows = []
    rank = 0
    previous = object()
    for key in ranked:
        if means[key] != previous:
            rank += 1
            previous = means[key]
        rows.append((rank, key, means[key], sizes[key]))
    return RankingTable(group_by=group_by, measure=measure, rows=rows)


@dataclass
class SpearmanTable:
    scenario_ids: list[str]
    algorithms: list[str]
    values: dict[tuple[str, str], float | None]
    best: set[tuple[str, str]]


def spearman_table(store: ResultStore) -> SpearmanTable:
    """Rank correlation per (scenario, algorithm) cell, recomputed from the
    stored predictions; the best cell per algorithm column is flagged (ties
    flag all maximal cells, undefined cells are excluded)."""
    scenario_ids: list[str] = []
    algorithms: list[str] = []
    values: dict[tuple[str, str], float | None] = {}
    for r in store.records:
        if r.scenario_id not in scenario_ids:
            scenario_ids.append(r.scenario_id)
        if r.algorithm not in algorithms:
            algorithms.append(r.algorithm)
        pred = np.array([p for _, _, p in r.predictions])
        actual = np.array([a for _, a, _ in r.predictions])
        if len(pred) < 2:
            raise ShapeError(
                f"cell ({r.scenario_id}, {r.algorithm}) has {len(pred)} predictions; "
                "need at least 2 for rank correlation"
            )
        try:
            values[(r.scenario_id, r.algorithm)] = spearman_rho(pred, actual)
        except UndefinedCorrelationError:
            values[(r.scenario_id, r.algorithm)] = None

    best: set[tuple[str, str]] = set()
    for alg in algorithms:
        defined = {
            sid: values[(sid, alg)]
            for sid in scenario_ids
            if values.get((sid, alg)) is not None
        }
        if not defined:
            continue
        top = max(defined.values())
        best.update((sid, alg) for sid, v in defined.items() if v == top)
    return SpearmanTable(scenario_ids, algorithms, values, best)


def emit_series(
    store: ResultStore, scenario_id: str, location: str, algorithm: str, path
) -> Path:
    """Write one cell's prediction series: date, actual, predicted, deviation."""
    record = store.get(scenario_id, location, algorithm)
    path = Path(path)
    lines = ["date,actual,predicted,deviation"]
    for d, actual, predicted in record.predictions:
        lines.append(
            f"{d.isoformat()},{fmt(actual)},{fmt(predicted)},{fmt(predicted - actual)}"
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def error_dispersion_correlation(store: ResultStore) -> float:
    """Pearson correlation between each cell's RMSE and its spread.

    Pairs every cell's RMSE value with the standard deviation of that
    cell's per-example squared errors, across all successful cells.
    """
    if len(store.records) < 2:
        raise ShapeError(
            f"need at least 2 cells, have {len(store.records)}"
        )
    x = np.array([r.report.rmse.value for r in store.records])
    y = np.array([r.report.rmse.stddev for r in store.records])
    return _pearson(x, y)


# ---------------------------------------------------------------------------
# report files

def write_summary(store: ResultStore, group_by: str, measure: str, path) -> Path:
    table = summarize(store, group_by, measure)
    lines = [f"rank,{table.group_by},mean_{table.measure.lower()},n_cells"]
    for rank, key, mean, n in table.rows:
        lines.append(f"{rank},{key},{fmt(mean)},{n}")
    path = Path(path)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def write_spearman(store: ResultStore, path) -> Path:
    table = spearman_table(store)
    lines = ["scenario_id,algorithm,spearman_rho,is_best"]
    for sid in table.scenario_ids:
        for alg in table.algorithms:
            if (sid, alg) not in table.values:
                continue
            value = table.values[(sid, alg)]
            flag = 1 if (sid, alg) in table.best else 0
            lines.append(f"{sid},{alg},{fmt(value)},{flag}")
    path = Path(path)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def write_dispersion(store: ResultStore, path) -> Path:
    correlation = error_dispersion_correlation(store)
    lines = [
        f"# rmse_stddev_pearson={fmt(correlation)}",
        "scenario_id,location,algorithm,rmse,rmse_stddev",
    ]
    for r in store.records:
        lines.append(
            f"{r.scenario_id},{r.location},{r.algorithm},"
            f"{fmt(r.report.rmse.value)},{fmt(r.report.rmse.stddev)}"
        )
    path = Path(path)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path

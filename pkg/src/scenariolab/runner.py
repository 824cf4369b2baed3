"""The scenario loop: assemble, window, split, train, predict, measure.

Each (scenario, algorithm) cell is an independent job with its own seed
derived from the run seed and the cell key, so cells reproduce bit-exactly
in isolation and may execute concurrently. A failing cell becomes a
first-class failed-cell entry instead of aborting the rest of the suite.
"""

from __future__ import annotations

import hashlib
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import date

from .errors import CellNotFoundError, ScenarioLabError, SuiteFailedError
from .learners import LearnerConfig, predict, train
from .metrics import DEFAULT_EPS_RE, MetricReport, evaluate
from .scenario import ScenarioSpec, ScenarioSuite
from .windowing import assemble, chronological_split, window


@dataclass
class RunConfig:
    suite: ScenarioSuite
    algorithms: list[LearnerConfig]
    window: int = 7
    split: float = 0.8
    seed: int = 0
    eps_re: float = DEFAULT_EPS_RE
    workers: int = 1

    def __post_init__(self):
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if not 0.0 < self.split < 1.0:
            raise ValueError("split must be in (0, 1)")
        if not self.algorithms:
            raise ValueError("need at least one algorithm")
        names = [a.algorithm for a in self.algorithms]
        if len(set(names)) != len(names):
            raise ValueError(
                "algorithm names must be unique within a run "
                "(each (scenario, algorithm) cell needs a unique key)"
            )
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


def cell_seed(run_seed: int, scenario_id: str, algorithm: str) -> int:
    """Stable per-cell seed: cells are independent yet reproducible."""
    digest = hashlib.sha256(
        f"{run_seed}:{scenario_id}:{algorithm}".encode()
    ).digest()
    return int.from_bytes(digest[:8], "big") >> 1


@dataclass(frozen=True)
class EvaluationRecord:
    scenario_id: str
    scenario_label: str
    location: str
    algorithm: str
    params: dict
    report: MetricReport
    predictions: tuple[tuple[date, float, float], ...]
    timing_s: float
    seed: int


@dataclass(frozen=True)
class FailedCell:
    scenario_id: str
    scenario_label: str
    location: str
    algorithm: str
    error_type: str
    message: str


CellResult = EvaluationRecord | FailedCell


def _run_cell(repo, spec: ScenarioSpec, learner: LearnerConfig, cfg: RunConfig) -> CellResult:
    seed = cell_seed(cfg.seed, spec.scenario_id, learner.algorithm)
    start = time.perf_counter()
    try:
        table = assemble(repo, spec)
        wt = window(table, cfg.window)
        train_wt, test_wt = chronological_split(wt, cfg.split)
        model = train(learner, train_wt, seed)
        pred = predict(model, test_wt.X)
        report = evaluate(pred, test_wt.y, cfg.eps_re)
    except ScenarioLabError as e:
        return FailedCell(
            scenario_id=spec.scenario_id,
            scenario_label=spec.label,
            location=spec.main_source,
            algorithm=learner.algorithm,
            error_type=type(e).__name__,
            message=str(e),
        )
    return EvaluationRecord(
        scenario_id=spec.scenario_id,
        scenario_label=spec.label,
        location=spec.main_source,
        algorithm=learner.algorithm,
        # JSON-safe snapshot so persisted records round-trip exactly.
        params={
            k: list(v) if isinstance(v, tuple) else v
            for k, v in learner.params.items()
        },
        report=report,
        predictions=tuple(
            (d, float(a), float(p))
            for d, a, p in zip(test_wt.example_dates, test_wt.y, pred)
        ),
        timing_s=time.perf_counter() - start,
        seed=seed,
    )


def run_suite(repo, cfg: RunConfig, progress=None) -> list[CellResult]:
    """Run every scenario x algorithm cell; order is scenario-major.

    progress, if given, is called with each finished CellResult.
    """
    cells = [
        (spec, learner) for spec in cfg.suite.scenarios for learner in cfg.algorithms
    ]
    if cfg.workers == 1:
        results = []
        for spec, learner in cells:
            result = _run_cell(repo, spec, learner, cfg)
            if progress is not None:
                progress(result)
            results.append(result)
    else:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            futures = [
                pool.submit(_run_cell, repo, spec, learner, cfg)
                for spec, learner in cells
            ]
            # Futures are collected in submission order, so the result list
            # stays deterministic no matter which cells finish first.
            results = []
            for f in futures:
                result = f.result()
                if progress is not None:
                    progress(result)
                results.append(result)

    if results and all(isinstance(r, FailedCell) for r in results):
        raise SuiteFailedError(
            f"all {len(results)} cells failed; first error: "
            f"{results[0].error_type}: {results[0].message}"
        )
    return results


def rerun_cell(repo, cfg: RunConfig, scenario_id: str, algorithm: str) -> EvaluationRecord:
    """Re-execute one cell; reproduces the suite-run record bit-exactly."""
    try:
        spec = cfg.suite.get(scenario_id)
    except ScenarioLabError:
        raise CellNotFoundError(f"no scenario {scenario_id!r} in the suite") from None
    for learner in cfg.algorithms:
        if learner.algorithm == algorithm:
            break
    else:
        raise CellNotFoundError(f"no algorithm {algorithm!r} in the run config")
    result = _run_cell(repo, spec, learner, cfg)
    if isinstance(result, FailedCell):
        raise ScenarioLabError(
            f"cell ({scenario_id}, {algorithm}) failed: "
            f"{result.error_type}: {result.message}"
        )
    return result

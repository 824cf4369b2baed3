"""Command-line surface: ingest, correlate, run, optimize, report, presets.

Exit codes: 0 success, 2 configuration or data error, 3 when some cells of
a run failed. Progress goes to stderr; results only ever land in the output
locations given on the command line. A run is driven by one JSON config
file naming the data directory, the scenario suite (file or presets),
algorithms and the window/split/seed settings; scalar flags override it.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import reporting
from .dataset import load_dataset, load_repository
from .errors import ScenarioLabError
from .gridsearch import WINDOW_GRID, ParamGrid, grid_search, preset_grid
from .learners import LearnerConfig
from .metrics import DEFAULT_EPS_RE, pearson_matrix
from .runner import FailedCell, RunConfig, run_suite
from .scenario import generate_presets, parse_suite, suite_to_dict, write_suite
from .windowing import assemble

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CELLS_FAILED = 3


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_CONFIG


def cmd_ingest(args) -> int:
    data_dir = Path(args.data_dir)
    if not data_dir.is_dir():
        return _fail(f"{data_dir}: not a directory")
    files = sorted(p for p in data_dir.iterdir() if p.is_file())
    if not files:
        return _fail(f"{data_dir}: no datasets found")
    entries = []
    problems = []
    for p in files:
        try:
            ds = load_dataset(p, p.stem, delimiter=args.delimiter)
        except ScenarioLabError as e:
            problems.append(f"{p}: {type(e).__name__}: {e}")
            continue
        entries.append(
            f"{ds.source_id},{p},{ds.n_rows},"
            f"{ds.dates[0].isoformat()},{ds.dates[-1].isoformat()}"
        )
    if problems:
        for line in problems:
            print(line, file=sys.stderr)
        return EXIT_CONFIG
    out = Path(args.out)
    out.write_text(
        "source_id,path,rows,first_date,last_date\n" + "\n".join(entries) + "\n",
        encoding="utf-8",
    )
    print(f"ingested {len(entries)} dataset(s) -> {out}", file=sys.stderr)
    return EXIT_OK


def cmd_correlate(args) -> int:
    try:
        repo = load_repository(args.data_dir, delimiter=args.delimiter)
        if args.sources:
            sources = args.sources.split(",")
        else:
            sources = [
                sid
                for sid in repo.source_ids
                if args.attribute in repo[sid].attribute_names
            ]
        if len(sources) < 2:
            return _fail(
                f"attribute {args.attribute!r} is present in {len(sources)} "
                "source(s); need at least 2"
            )
        matrix = pearson_matrix(repo, args.attribute, sources)
    except ScenarioLabError as e:
        return _fail(f"{type(e).__name__}: {e}")

    lines = [f"# attribute={args.attribute}", "source_id," + ",".join(sources)]
    for i, sid in enumerate(sources):
        lines.append(
            sid + "," + ",".join(reporting.fmt(v) for v in matrix.entries[i])
        )
    lines.append("# pairwise_common_dates")
    lines.append("source_id," + ",".join(sources))
    for i, sid in enumerate(sources):
        lines.append(sid + "," + ",".join(str(int(v)) for v in matrix.n_common[i]))
    out = Path(args.out)
    out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"correlation matrix for {len(sources)} source(s) -> {out}", file=sys.stderr)
    return EXIT_OK


def _algorithms_from_config(doc: dict, suite) -> list[LearnerConfig]:
    if "algorithms" in doc:
        return [
            LearnerConfig(a["algorithm"], a.get("params", {}))
            for a in doc["algorithms"]
        ]
    if suite.defaults.algorithms:
        return [LearnerConfig(name) for name in suite.defaults.algorithms]
    return [LearnerConfig(name) for name in ("KNN", "DT", "GBT", "DL")]


def _suite_from_config(doc: dict, base: Path):
    if "scenarios" in doc:
        return parse_suite(base / doc["scenarios"], delimiter=doc.get("delimiter", ","))
    if "presets" in doc:
        p = doc["presets"]
        return generate_presets(
            p["main"],
            p["target_attribute"],
            p["context_attribute"],
            list(p["neighbors"]),
            p["neighbor_attribute"],
        )
    raise ScenarioLabError("config needs either 'scenarios' (file) or 'presets'")


def _load_run_config(config_path: Path, overrides) -> tuple[RunConfig, dict, Path]:
    doc = json.loads(config_path.read_text(encoding="utf-8"))
    base = config_path.parent
    suite = _suite_from_config(doc, base)
    algorithms = _algorithms_from_config(doc, suite)

    def setting(flag, key, suite_value, default):
        if flag is not None:
            return flag
        if key in doc:
            return doc[key]
        if suite_value is not None:
            return suite_value
        return default

    cfg = RunConfig(
        suite=suite,
        algorithms=algorithms,
        window=int(setting(overrides.window, "window", suite.defaults.window, 7)),
        split=float(setting(overrides.split, "split", suite.defaults.split, 0.8)),
        seed=int(setting(overrides.seed, "seed", None, 0)),
        eps_re=float(doc.get("eps_re", DEFAULT_EPS_RE)),
        workers=int(overrides.workers or doc.get("workers", 1)),
    )
    snapshot = {
        "data_dir": doc["data_dir"],
        "delimiter": doc.get("delimiter", ","),
        "window": cfg.window,
        "split": cfg.split,
        "seed": cfg.seed,
        "eps_re": cfg.eps_re,
        "algorithms": [
            {"algorithm": a.algorithm, "params": a.params} for a in cfg.algorithms
        ],
        "suite": suite_to_dict(suite),
    }
    data_dir = Path(doc["data_dir"])
    if not data_dir.is_absolute():
        data_dir = base / data_dir
    return cfg, snapshot, data_dir


def cmd_run(args) -> int:
    try:
        cfg, snapshot, data_dir = _load_run_config(Path(args.config), args)
        repo = load_repository(data_dir, delimiter=snapshot["delimiter"])
    except (ScenarioLabError, OSError, KeyError, json.JSONDecodeError) as e:
        return _fail(f"{type(e).__name__}: {e}")

    total = len(cfg.suite.scenarios) * len(cfg.algorithms)
    done = [0]

    def progress(result):
        done[0] += 1
        if isinstance(result, FailedCell):
            status = f"FAILED {result.error_type}: {result.message}"
        else:
            status = (
                f"ok RE={reporting.fmt(result.report.re.value)} "
                f"({result.timing_s:.2f}s)"
            )
        print(
            f"[{done[0]}/{total}] {result.scenario_id} x {result.algorithm}: {status}",
            file=sys.stderr,
        )

    try:
        results = run_suite(repo, cfg, progress=progress)
    except ScenarioLabError as e:
        # Every cell failing means the run setup itself is broken.
        return _fail(f"{type(e).__name__}: {e}")

    store = reporting.ResultStore.from_results(results, snapshot)
    reporting.save_store(store, args.out)
    failed = [r for r in results if isinstance(r, FailedCell)]
    if failed:
        print(f"{len(failed)} cell(s) failed:", file=sys.stderr)
        for f in failed:
            print(
                f"  {f.scenario_id} x {f.algorithm}: {f.error_type}: {f.message}",
                file=sys.stderr,
            )
        return EXIT_CELLS_FAILED
    print(f"wrote {len(store.records)} cell(s) -> {args.out}", file=sys.stderr)
    return EXIT_OK


def cmd_optimize(args) -> int:
    try:
        config_path = Path(args.config)
        doc = json.loads(config_path.read_text(encoding="utf-8"))
        base = config_path.parent
        suite = _suite_from_config(doc, base)
        spec = suite.get(doc["scenario_id"]) if "scenario_id" in doc else suite.scenarios[0]
        repo = load_repository(
            base / doc["data_dir"]
            if not Path(doc["data_dir"]).is_absolute()
            else doc["data_dir"],
            delimiter=doc.get("delimiter", ","),
        )
        alg = doc["algorithm"]
        config = LearnerConfig(alg["algorithm"], alg.get("params", {}))
        objective = doc.get("objective", "RE")
        if "grid" in doc:
            grid = ParamGrid(
                axes=tuple((n, tuple(v)) for n, v in doc["grid"]),
                objective=objective,
            )
        else:
            grid = preset_grid(config.algorithm, objective=objective)
        w_axis = doc.get("window_grid")
        if w_axis == "preset":
            w_axis = WINDOW_GRID
        table = assemble(repo, spec)
        result = grid_search(
            config,
            grid,
            table,
            w_axis=w_axis,
            split=float(doc.get("split", 0.8)),
            seed=int(doc.get("seed", 0)),
            window_size=int(doc.get("window", 7)),
        )
    except (ScenarioLabError, OSError, KeyError, json.JSONDecodeError) as e:
        return _fail(f"{type(e).__name__}: {e}")

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "grid.csv"
    lines = [
        f"# algorithm={config.algorithm}",
        f"# scenario={spec.scenario_id}",
        f"# objective={result.objective}",
        f"# best_trial={result.best}",
        f"# best_assignment={json.dumps(result.best_assignment, sort_keys=True)}",
        "trial,assignment,objective_value,ae,re,rmse,spearman",
    ]
    for i, (assignment, report) in enumerate(result.trials):
        assignment_text = json.dumps(assignment, sort_keys=True).replace(",", ";")
        lines.append(
            f"{i},{assignment_text},{reporting.fmt(result.objectives[i])},"
            f"{reporting.fmt(report.ae.value)},{reporting.fmt(report.re.value)},"
            f"{reporting.fmt(report.rmse.value)},{reporting.fmt(report.spearman)}"
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(
        f"{len(result.trials)} trial(s); best #{result.best} "
        f"{result.best_assignment} -> {path}",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_report(args) -> int:
    try:
        store = reporting.load_store(args.results_dir)
        reports = Path(args.results_dir) / "reports"
        reports.mkdir(exist_ok=True)
        if args.kind == "summary":
            path = reporting.write_summary(
                store,
                args.group_by,
                args.measure,
                reports / f"summary_{args.group_by}_{args.measure.lower()}.csv",
            )
        elif args.kind == "spearman":
            path = reporting.write_spearman(store, reports / "spearman.csv")
        elif args.kind == "dispersion":
            path = reporting.write_dispersion(store, reports / "dispersion.csv")
        else:  # series
            for name in ("scenario", "location", "algorithm"):
                if getattr(args, name) is None:
                    return _fail(f"report kind 'series' requires --{name}")
            path = reporting.emit_series(
                store,
                args.scenario,
                args.location,
                args.algorithm,
                reports / f"series_{args.scenario}__{args.location}__{args.algorithm}.csv",
            )
    except (ScenarioLabError, OSError, json.JSONDecodeError) as e:
        return _fail(f"{type(e).__name__}: {e}")
    print(f"wrote {path}", file=sys.stderr)
    return EXIT_OK


def cmd_presets(args) -> int:
    try:
        suite = generate_presets(
            args.main,
            args.target_attr,
            args.context_attr,
            [n.strip() for n in args.neighbors.split(",") if n.strip()],
            args.neighbor_attr,
        )
    except ScenarioLabError as e:
        return _fail(f"{type(e).__name__}: {e}")
    write_suite(suite, args.out)
    print(f"wrote {len(suite.scenarios)} scenario(s) -> {args.out}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scenariolab",
        description="Scenario experiments for time-series prediction with "
        "context and collaborative sources.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="load a data directory and write a manifest")
    p.add_argument("data_dir")
    p.add_argument("--out", default="manifest.csv")
    p.add_argument("--delimiter", default=",")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("correlate", help="pairwise correlation of one attribute")
    p.add_argument("data_dir")
    p.add_argument("attribute")
    p.add_argument("--sources", default=None, help="comma-separated subset")
    p.add_argument("--out", default="correlations.csv")
    p.add_argument("--delimiter", default=",")
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("run", help="run a scenario suite from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--window", type=int, default=None)
    p.add_argument("--split", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("optimize", help="grid search from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("report", help="emit report files from a results directory")
    p.add_argument("results_dir")
    p.add_argument("kind", choices=("summary", "spearman", "dispersion", "series"))
    p.add_argument("--group-by", default="algorithm", choices=("algorithm", "location", "scenario"))
    p.add_argument("--measure", default="RE")
    p.add_argument("--scenario", default=None)
    p.add_argument("--location", default=None)
    p.add_argument("--algorithm", default=None)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("presets", help="write the six preset scenarios to a file")
    p.add_argument("--main", required=True)
    p.add_argument("--target-attr", required=True)
    p.add_argument("--context-attr", required=True)
    p.add_argument("--neighbors", required=True, help="comma-separated source ids")
    p.add_argument("--neighbor-attr", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_presets)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure numpy fallback.

Times the three hot kernels at sizes typical for a suite run (one year of
daily data, window 7 over five attributes) plus whole train+predict cycles
for the learners that use them, and checks both backends return identical
bits. Usage: python benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import time

import numpy as np

import scenariolab._kernels as kernels
from scenariolab import LearnerConfig, predict, train_xy
from scenariolab._kernels import _pure

try:
    from scenariolab._kernels import _core
except ImportError:
    _core = None


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - start)
    return min(times), result


def report(name, pure_s, compiled_s):
    if compiled_s is None:
        print(f"{name:<28} python {pure_s * 1e3:8.2f} ms   (no compiled backend)")
    else:
        speedup = pure_s / compiled_s if compiled_s > 0 else float("inf")
        print(
            f"{name:<28} python {pure_s * 1e3:8.2f} ms   "
            f"compiled {compiled_s * 1e3:8.2f} ms   x{speedup:.1f}"
        )


def bench_kernels(repeats):
    rng = np.random.default_rng(0)
    n_train, n_test, d = 800, 200, 35

    a = rng.normal(size=(n_test, d))
    b = rng.normal(size=(n_train, d))
    tp, rp = best_of(lambda: _pure.pairwise_sq_dists(a, b), repeats)
    tc = rc = None
    if _core is not None:
        tc, rc = best_of(lambda: _core.pairwise_sq_dists(a, b), repeats)
        assert np.array_equal(rp, rc)
    report("pairwise_sq_dists", tp, tc)

    x = np.sort(rng.normal(size=n_train))
    y = rng.normal(size=n_train)
    tp, rp = best_of(lambda: _pure.split_scan_sorted(x, y, 2), repeats)
    if _core is not None:
        tc, rc = best_of(lambda: _core.split_scan_sorted(x, y, 2), repeats)
        assert rp == rc
    report("split_scan_sorted (n=800)", tp, tc)

    binned = rng.integers(0, 20, size=(n_train, d)).astype(np.int32)
    idx = np.arange(n_train, dtype=np.int64)
    grad = rng.normal(size=n_train)
    tp, rp = best_of(lambda: _pure.hist_split_scan(binned, idx, grad, 20), repeats)
    if _core is not None:
        tc, rc = best_of(lambda: _core.hist_split_scan(binned, idx, grad, 20), repeats)
        assert rp == rc
    report("hist_split_scan (800x35)", tp, tc)


def bench_learners(repeats):
    rng = np.random.default_rng(1)
    X = rng.normal(size=(800, 35))
    y = rng.normal(size=800)
    Q = rng.normal(size=(200, 35))
    jobs = {
        "KNN train+predict": LearnerConfig("KNN"),
        "DT train+predict": LearnerConfig("DT"),
        "GBT train+predict": LearnerConfig("GBT"),
    }

    def cycle(config):
        return predict(train_xy(config, X, y, seed=0), Q)

    backends = {"pure": _pure}
    if _core is not None:
        backends["compiled"] = _core

    for name, config in jobs.items():
        timings = {}
        outputs = {}
        for backend_name, module in backends.items():
            kernels.pairwise_sq_dists = module.pairwise_sq_dists
            kernels.split_scan_sorted = module.split_scan_sorted
            kernels.hist_split_scan = module.hist_split_scan
            timings[backend_name], outputs[backend_name] = best_of(
                lambda: cycle(config), repeats
            )
        if len(outputs) == 2:
            assert np.array_equal(outputs["pure"], outputs["compiled"])
        report(name, timings["pure"], timings.get("compiled"))

    # Restore whatever backend was selected at import.
    kernels.pairwise_sq_dists = kernels._impl.pairwise_sq_dists
    kernels.split_scan_sorted = kernels._impl.split_scan_sorted
    kernels.hist_split_scan = kernels._impl.hist_split_scan


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    print(f"active backend: {kernels.BACKEND}")
    if _core is None:
        print("compiled extension not built; timing the fallback only\n")
    print()
    bench_kernels(args.repeats)
    print()
    bench_learners(args.repeats)
    print("\nall outputs bit-identical across backends")


if __name__ == "__main__":
    main()

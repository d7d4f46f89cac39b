"""Benchmark the compiled numeric kernels against the numpy fallback.

Times the three backend entry points (grow_tree, predict_tree, pegasos)
on identical inputs, verifies that both implementations return the same
results, and finishes with one end-to-end paired comparison per backend
in a subprocess (backend choice is frozen at import, so the full-stack
number needs a fresh interpreter with MUTSEL_BACKEND set).

Usage::

    python3 benchmarks/bench_backends.py [--repeats 5] [--seed 0]
    python3 benchmarks/bench_backends.py --skip-end-to-end
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np

from mutsel.backends import py as py_backend

try:
    from mutsel.backends import _compiled as c_backend
except ImportError:
    c_backend = None

TREE_SIZES = (500, 2000, 8000)
TREE_FEATURES = 8
TREE_DEPTH = 12
SVM_SIZES = (200, 400, 800)
SVM_EPOCHS = 5
SVM_LAMBDA = 1e-3

END_TO_END_SNIPPET = """
import json, time
from mutsel import backends
from mutsel.data import make_synthetic
from mutsel.harness import ExperimentConfig, run_paired_comparison
from mutsel.learners import candidate_grid

ds = make_synthetic(300, 5, 2.0, 0.1, seed=42)
cfg = ExperimentConfig(ds, candidate_grid("decision_tree", range(1, 9)),
                       repeats=2, k_outer=5, k_inner=5, seed=7)
t0 = time.perf_counter()
res = run_paired_comparison(cfg)
print(json.dumps({
    "backend": backends.backend_name(),
    "seconds": time.perf_counter() - t0,
    "mean_diff": float(res.valid_diff().mean()),
}))
"""


def best_of(fn, repeats):
    """Smallest wall time over ``repeats`` calls, plus the last result."""
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def tree_equal(a, b):
    feature_a, threshold_a = a[0], a[1]
    feature_b, threshold_b = b[0], b[1]
    return (np.array_equal(feature_a, feature_b)
            and np.array_equal(threshold_a, threshold_b, equal_nan=True)
            and all(np.array_equal(x, y) for x, y in zip(a[2:], b[2:])))


def bench_trees(repeats, seed, rows):
    gen = np.random.default_rng(seed)
    for n in TREE_SIZES:
        X = gen.normal(size=(n, TREE_FEATURES))
        y = (X[:, 0] + 0.5 * X[:, 1] ** 2
             + gen.normal(scale=0.5, size=n) > 0.3).astype(np.int64)
        order = np.argsort(X, axis=0, kind="stable").T.copy()

        t_py, tree_py = best_of(
            lambda: py_backend.grow_tree(X, y, order, TREE_DEPTH), repeats)
        t_c, tree_c = best_of(
            lambda: c_backend.grow_tree(X, y, order, TREE_DEPTH), repeats)
        assert tree_equal(tree_py, tree_c), "grow_tree results diverge"
        rows.append(("grow_tree", "n=%d f=%d depth=%d"
                     % (n, TREE_FEATURES, TREE_DEPTH), t_py, t_c))

        args = tree_py
        t_py, pred_py = best_of(
            lambda: py_backend.predict_tree(X, *args), repeats)
        t_c, pred_c = best_of(
            lambda: c_backend.predict_tree(X, *args), repeats)
        assert np.array_equal(pred_py, pred_c), "predictions diverge"
        rows.append(("predict_tree", "n=%d" % n, t_py, t_c))


def bench_pegasos(repeats, seed, rows):
    gen = np.random.default_rng(seed + 1)
    for n in SVM_SIZES:
        X = gen.normal(size=(n, 6))
        y_pm = np.where(X[:, 0] + X[:, 1] > 0, 1.0, -1.0)
        G = (X @ X.T + 1.0) ** 3
        draws = gen.integers(0, n, size=SVM_EPOCHS * n)

        t_py, a_py = best_of(
            lambda: py_backend.pegasos(G, y_pm, draws, SVM_LAMBDA), repeats)
        t_c, a_c = best_of(
            lambda: c_backend.pegasos(G, y_pm, draws, SVM_LAMBDA), repeats)
        assert np.array_equal(a_py, a_c), "pegasos counts diverge"
        rows.append(("pegasos", "n=%d T=%d" % (n, draws.size), t_py, t_c))


def bench_end_to_end():
    print("\nend-to-end paired comparison (fresh interpreter per backend):")
    results = {}
    for backend in ("python", "compiled"):
        env = dict(os.environ, MUTSEL_BACKEND=backend)
        proc = subprocess.run(
            [sys.executable, "-c", END_TO_END_SNIPPET],
            capture_output=True, text=True, env=env, check=True,
        )
        doc = json.loads(proc.stdout.strip().splitlines()[-1])
        assert doc["backend"] == backend
        results[backend] = doc
        print("  %-8s %7.2f s" % (backend, doc["seconds"]))
    if results["python"]["mean_diff"] != results["compiled"]["mean_diff"]:
        raise AssertionError("backends disagree on the paired result")
    print("  speedup  %7.2fx (identical mean score difference %+0.5f)"
          % (results["python"]["seconds"] / results["compiled"]["seconds"],
             results["python"]["mean_diff"]))


def main(argv=None):
    parser = argparse.ArgumentParser(
        description="compare the compiled and pure numpy backends")
    parser.add_argument("--repeats", type=int, default=5,
                        help="timing repeats; the best run is reported")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--skip-end-to-end", action="store_true")
    args = parser.parse_args(argv)

    if c_backend is None:
        print("compiled extension is not built; nothing to compare "
              "(reinstall with the default build to enable it)")
        return 1

    rows = []
    bench_trees(args.repeats, args.seed, rows)
    bench_pegasos(args.repeats, args.seed, rows)

    print("%-13s %-22s %11s %11s %8s"
          % ("kernel", "workload", "python", "compiled", "speedup"))
    for kernel, workload, t_py, t_c in rows:
        print("%-13s %-22s %8.2f ms %8.2f ms %7.1fx"
              % (kernel, workload, 1e3 * t_py, 1e3 * t_c, t_py / t_c))

    if not args.skip_end_to_end:
        bench_end_to_end()
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Timing comparison of the two tree-growing kernels.

Runs the same forest fits on both backends, checks the fitted trees are
bit-identical, and reports wall time per backend plus the speedup.

Usage:
    python3 benchmarks/bench_forest.py [--rows 2000] [--cols 256]
                                       [--trees 50] [--repeats 3]
"""

import argparse
import time

import numpy as np

from mixval.learner import LearnerParams, fit, predict_score


def synth_problem(n_rows, n_cols, seed):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n_rows, n_cols))
    w = rng.standard_normal(n_cols) / np.sqrt(n_cols)
    logits = X @ w + 0.5 * rng.standard_normal(n_rows)
    return X, (logits > 0).astype(np.int64)


def time_backend(backend, X, y, params, repeats):
    best = float("inf")
    model = None
    for _ in range(repeats):
        start = time.perf_counter()
        model = fit(X, y, params, backend=backend)
        best = min(best, time.perf_counter() - start)
    return best, model


def trees_identical(a, b):
    if len(a.trees) != len(b.trees):
        return False
    for ta, tb in zip(a.trees, b.trees):
        for fa, fb in zip(ta, tb):
            if not np.array_equal(fa, fb):
                return False
    return True


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rows", type=int, default=2000)
    ap.add_argument("--cols", type=int, default=256)
    ap.add_argument("--trees", type=int, default=50)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    X, y = synth_problem(args.rows, args.cols, args.seed)
    params = LearnerParams(n_trees=args.trees, seed=args.seed)
    print(f"problem: {args.rows} rows x {args.cols} features, "
          f"{args.trees} trees, best of {args.repeats}")

    t_py, m_py = time_backend("python", X, y, params, args.repeats)
    print(f"python   kernel: {t_py:8.3f} s")
    try:
        t_c, m_c = time_backend("compiled", X, y, params, args.repeats)
    except ValueError as err:
        print(f"compiled kernel: unavailable ({err})")
        return
    print(f"compiled kernel: {t_c:8.3f} s   ({t_py / t_c:.1f}x faster)")

    same_trees = trees_identical(m_py, m_c)
    same_scores = np.array_equal(predict_score(m_py, X),
                                 predict_score(m_c, X))
    print(f"identical trees: {same_trees}, identical scores: {same_scores}")
    if not (same_trees and same_scores):
        raise SystemExit("backend outputs diverged")


if __name__ == "__main__":
    main()

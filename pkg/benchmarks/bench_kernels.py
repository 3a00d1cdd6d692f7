#!/usr/bin/env python3
"""Benchmark the compiled coordinate-descent kernel against the
pure-Python fallback on representative problem sizes.

Usage: python benchmarks/bench_kernels.py [--reps 5]
"""

import argparse
import time

import numpy as np

from hdlp import _cd_py

try:
    from hdlp import _cd_fast
except ImportError:
    _cd_fast = None


def make_problem(rng, t, n):
    X = rng.standard_normal((t, n))
    X -= X.mean(axis=0)
    beta = np.zeros(n)
    beta[: max(2, n // 20)] = rng.standard_normal(max(2, n // 20))
    y = X @ beta + rng.standard_normal(t)
    y -= y.mean()
    gram = np.ascontiguousarray(X.T @ X / t)
    q = np.ascontiguousarray(X.T @ y / t)
    lam = 0.5 * np.max(np.abs(q))
    return gram, q, lam


def run(kernel, gram, q, lam, reps):
    n = q.shape[0]
    w = np.ones(n)
    best = np.inf
    sweeps = 0
    for _ in range(reps):
        beta = np.zeros(n)
        gb = np.zeros(n)
        start = time.perf_counter()
        sweeps, _ = kernel(gram, q, w, lam, beta, gb, 10_000, 1e-8)
        best = min(best, time.perf_counter() - start)
    return best, sweeps


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--reps", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    sizes = [(200, 100), (500, 50), (200, 400), (700, 1000)]
    print(f"{'T':>5} {'N':>5} {'python (ms)':>12} {'compiled (ms)':>14} {'speedup':>8} {'sweeps':>7}")
    for t, n in sizes:
        gram, q, lam = make_problem(rng, t, n)
        t_py, sweeps = run(_cd_py.lasso_cd_gram, gram, q, lam, args.reps)
        if _cd_fast is not None:
            t_c, sweeps_c = run(_cd_fast.lasso_cd_gram, gram, q, lam, args.reps)
            assert sweeps == sweeps_c
            print(f"{t:>5} {n:>5} {t_py * 1e3:>12.2f} {t_c * 1e3:>14.2f} "
                  f"{t_py / t_c:>8.1f} {sweeps:>7}")
        else:
            print(f"{t:>5} {n:>5} {t_py * 1e3:>12.2f} {'n/a':>14} {'n/a':>8} {sweeps:>7}")


if __name__ == "__main__":
    main()

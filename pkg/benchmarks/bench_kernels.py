#!/usr/bin/env python3
"""Benchmark the compiled pair kernels against the NumPy fallback.

Usage:
    python3 benchmarks/bench_kernels.py [--sizes 64,256,1024] [--reps 5]

Prints per-size timings for the energy and gradient kernels under both
backends and the speedup; exits nonzero if the backends disagree beyond
1e-12 relative.
"""

import argparse
import sys
import time

import numpy as np

from simplexflow import _reference
from simplexflow._backend import have_compiled


def time_call(fn, reps):
    best = float("inf")
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def run(sizes, reps, dim, alpha, beta):
    if not have_compiled():
        print("compiled kernels are not built; nothing to compare", file=sys.stderr)
        return 1
    from simplexflow import _core

    rng = np.random.default_rng(0)
    status = 0
    header = f"{'N':>6} {'kernel':>9} {'python':>12} {'compiled':>12} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for n in sizes:
        pts = np.ascontiguousarray(rng.standard_normal((n, dim)))
        wts = np.ascontiguousarray(np.full(n, 1.0 / n))
        e_py = np.empty(n)
        e_cy = np.empty(n)
        g_py = np.empty_like(pts)
        g_cy = np.empty_like(pts)

        t_py = time_call(lambda: _reference.row_energies(pts, wts, alpha, beta, False, e_py, 0, n), reps)
        t_cy = time_call(lambda: _core.row_energies(pts, wts, alpha, beta, False, e_cy, 0, n), reps)
        # disagreement is measured against the magnitude of the result
        if np.abs(e_py - e_cy).max() > 1e-12 * max(np.abs(e_py).max(), 1.0):
            print(f"!! energy mismatch at N={n}", file=sys.stderr)
            status = 1
        print(f"{n:>6} {'energy':>9} {t_py * 1e3:>10.3f}ms {t_cy * 1e3:>10.3f}ms {t_py / t_cy:>7.1f}x")

        t_py = time_call(lambda: _reference.field_gradient_rows(pts, wts, alpha, beta, g_py, 0, n), reps)
        t_cy = time_call(lambda: _core.field_gradient_rows(pts, wts, alpha, beta, g_cy, 0, n), reps)
        if np.abs(g_py - g_cy).max() > 1e-12 * max(np.abs(g_py).max(), 1.0):
            print(f"!! gradient mismatch at N={n}", file=sys.stderr)
            status = 1
        print(f"{n:>6} {'gradient':>9} {t_py * 1e3:>10.3f}ms {t_cy * 1e3:>10.3f}ms {t_py / t_cy:>7.1f}x")
    return status


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="64,256,1024")
    ap.add_argument("--reps", type=int, default=5)
    ap.add_argument("--dim", type=int, default=2)
    ap.add_argument("--alpha", type=float, default=10.0)
    ap.add_argument("--beta", type=float, default=2.0)
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    return run(sizes, args.reps, args.dim, args.alpha, args.beta)


if __name__ == "__main__":
    sys.exit(main())

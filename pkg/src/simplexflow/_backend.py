"""Kernel backend selection and threaded dispatch.

The compiled extension (`simplexflow._core`, Cython) is preferred when
importable; otherwise the NumPy reference takes over.  Set
SIMPLEXFLOW_BACKEND=python|compiled to force a choice.

Work is partitioned by rows.  Each row of a result is computed in exactly
one task from the full input arrays, and scalar reductions combine the
per-row values in index order with math.fsum, so results are bitwise
independent of the thread count within a backend.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _reference

_forced = os.environ.get("SIMPLEXFLOW_BACKEND", "").strip().lower()

if _forced == "python":
    _impl = _reference
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]
    except ImportError:
        if _forced == "compiled":
            raise ImportError(
                "SIMPLEXFLOW_BACKEND=compiled but simplexflow._core is not built"
            )
        _impl = _reference

_default_threads = 1


def backend_name() -> str:
    return "compiled" if _impl.COMPILED else "python"


def have_compiled() -> bool:
    try:
        from . import _core  # noqa: F401
    except ImportError:
        return False
    return True


def set_num_threads(k: int) -> None:
    global _default_threads
    if k < 1:
        raise ValueError(f"thread count must be >= 1, got {k}")
    _default_threads = int(k)


def get_num_threads() -> int:
    return _default_threads


def _resolve_threads(threads, n_rows):
    k = _default_threads if threads is None else int(threads)
    return max(1, min(k, n_rows))


def _run_rows(fn, n_rows, out, threads, args):
    """Call fn(*args, out_slice, row0, row1) over a row partition."""
    if threads <= 1:
        fn(*args, out, 0, n_rows)
        return
    bounds = np.linspace(0, n_rows, threads + 1).astype(int)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [
            pool.submit(fn, *args, out[lo:hi], lo, hi)
            for lo, hi in zip(bounds[:-1], bounds[1:])
            if hi > lo
        ]
        for f in futures:
            f.result()


def _as_c(points, weights):
    pts = np.ascontiguousarray(points, dtype=float)
    wts = np.ascontiguousarray(weights, dtype=float)
    return pts, wts


def pair_energy(points, weights, alpha, beta, hard=False, threads=None) -> float:
    """Double-sum interaction energy sum_{i != j} m_i m_j w(|x_i - x_j|)."""
    pts, wts = _as_c(points, weights)
    n = pts.shape[0]
    out = np.empty(n)
    k = _resolve_threads(threads, n)
    _run_rows(_impl.row_energies, n, out, k, (pts, wts, float(alpha), float(beta), bool(hard)))
    if np.isinf(out).any():
        return math.inf
    return math.fsum(out.tolist())


def power_moment_energy(points, weights, p, threads=None) -> float:
    """Single power-law energy sum_{i != j} m_i m_j |x_i - x_j|**p / p."""
    pts, wts = _as_c(points, weights)
    n = pts.shape[0]
    out = np.empty(n)
    k = _resolve_threads(threads, n)
    _run_rows(_impl.power_moment_rows, n, out, k, (pts, wts, float(p)))
    return math.fsum(out.tolist())


def field_gradient(points, weights, alpha, beta, threads=None) -> np.ndarray:
    """Row i: sum_{j != i} m_j grad W(x_i - x_j).  Finite alpha only."""
    pts, wts = _as_c(points, weights)
    n = pts.shape[0]
    out = np.empty_like(pts)
    k = _resolve_threads(threads, n)
    _run_rows(_impl.field_gradient_rows, n, out, k, (pts, wts, float(alpha), float(beta)))
    return out


def potential_values(points, weights, alpha, beta, hard, targets, threads=None) -> np.ndarray:
    """Convolution potential of the measure evaluated at each target point."""
    pts, wts = _as_c(points, weights)
    tgt = np.ascontiguousarray(targets, dtype=float)
    m = tgt.shape[0]
    out = np.empty(m)
    k = _resolve_threads(threads, m)
    _run_rows(
        _impl.potential_rows, m, out, k,
        (pts, wts, float(alpha), float(beta), bool(hard), tgt),
    )
    return out


def gram_matrix(points, alpha, beta, hard=False, threads=None) -> np.ndarray:
    """Matrix G[i, j] = w(|x_i - x_j|) with zero diagonal."""
    pts = np.ascontiguousarray(points, dtype=float)
    n = pts.shape[0]
    out = np.empty((n, n))
    k = _resolve_threads(threads, n)
    _run_rows(_impl.gram_rows, n, out, k, (pts, float(alpha), float(beta), bool(hard)))
    return out

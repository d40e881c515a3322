"""Pure-NumPy implementations of the O(N^2) pair kernels.

This is the fallback backend; `_core` (compiled) provides the same
row-range functions.  Every function computes rows [row0, row1) of its
result so callers can partition work across threads: each row depends only
on the full input arrays, which makes the combined output independent of
the partitioning.
"""

import numpy as np

from .kernel import HARD_CUTOFF_TOL

COMPILED = False


def _w_array(r, alpha, beta, hard):
    # r >= 0 with exact zeros on the diagonal; beta > 0 keeps 0**e safe.
    # Overshooting trial configurations overflow to +inf, which is the
    # wanted semantics (attraction dominates), so warnings are silenced
    # and the inf - inf case is resolved toward the attraction term.
    with np.errstate(over="ignore", invalid="ignore"):
        if hard:
            out = -np.power(r, beta) / beta
            return np.where(r > 1.0 + HARD_CUTOFF_TOL, np.inf, out)
        a = np.power(r, alpha) / alpha
        out = a - np.power(r, beta) / beta
        if alpha > beta:
            out = np.where(np.isinf(a), np.inf, out)
        return out


def row_energies(pts, wts, alpha, beta, hard, out, row0, row1):
    """out[i-row0] = 2 m_i sum_{j>i} m_j w(|x_i-x_j|)."""
    for i in range(row0, row1):
        if i + 1 == pts.shape[0]:
            out[i - row0] = 0.0
            continue
        d = np.sqrt(np.einsum("jk,jk->j", pts[i + 1 :] - pts[i], pts[i + 1 :] - pts[i]))
        out[i - row0] = 2.0 * wts[i] * float(wts[i + 1 :] @ _w_array(d, alpha, beta, hard))


def power_moment_rows(pts, wts, p, out, row0, row1):
    """out[i-row0] = 2 m_i sum_{j>i} m_j |x_i-x_j|**p / p."""
    for i in range(row0, row1):
        if i + 1 == pts.shape[0]:
            out[i - row0] = 0.0
            continue
        d = np.sqrt(np.einsum("jk,jk->j", pts[i + 1 :] - pts[i], pts[i + 1 :] - pts[i]))
        out[i - row0] = 2.0 * wts[i] * float(wts[i + 1 :] @ (np.power(d, p) / p))


def field_gradient_rows(pts, wts, alpha, beta, out, row0, row1):
    """out[i-row0] = sum_{j != i} m_j (r**(a-2) - r**(b-2)) (x_i - x_j)."""
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(row0, row1):
            diff = pts[i] - pts
            r = np.sqrt(np.einsum("jk,jk->j", diff, diff))
            r[i] = 1.0  # diagonal excluded below
            factor = np.power(r, alpha - 2.0) - np.power(r, beta - 2.0)
            factor[i] = 0.0
            out[i - row0] = (factor * wts) @ diff


def potential_rows(pts, wts, alpha, beta, hard, targets, out, t0, t1):
    """out[t-t0] = sum_j m_j w(|targets[t] - x_j|)."""
    for t in range(t0, t1):
        diff = targets[t] - pts
        d = np.sqrt(np.einsum("jk,jk->j", diff, diff))
        out[t - t0] = float(wts @ _w_array(d, alpha, beta, hard))


def gram_rows(pts, alpha, beta, hard, out, row0, row1):
    """out[i-row0, j] = w(|x_i - x_j|) with zero diagonal."""
    for i in range(row0, row1):
        diff = pts[i] - pts
        d = np.sqrt(np.einsum("jk,jk->j", diff, diff))
        row = _w_array(d, alpha, beta, hard)
        row[i] = 0.0
        out[i - row0] = row

"""Projected-gradient machinery for quadratic objectives on the probability simplex."""

import numpy as np


def project_to_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto {x >= 0, sum x = 1} (sort-based, exact)."""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    rho = np.nonzero(u + (1.0 - css) / np.arange(1, v.size + 1) > 0)[0][-1]
    lam = (1.0 - css[rho]) / (rho + 1.0)
    return np.maximum(v + lam, 0.0)


def kkt_residual(grad: np.ndarray, x: np.ndarray, minimize: bool = True) -> float:
    """First-order optimality violation on the simplex.

    For a minimum: grad_i = nu on the support, grad_i >= nu off it.
    """
    g = grad if minimize else -grad
    active = x > 1e-14
    nu = float(g[active].min())
    spread = float(g[active].max()) - nu
    off = 0.0
    if np.any(~active):
        off = max(0.0, nu - float(g[~active].min()))
    return max(spread, off)


def minimize_quadratic_on_simplex(
    quad: np.ndarray,
    lin: np.ndarray | None = None,
    x0: np.ndarray | None = None,
    tol: float = 1e-12,
    max_iter: int = 5000,
    exact_line_search: bool = False,
):
    """Minimize f(x) = x' Q x + c' x over the probability simplex.

    Projected gradient with Armijo backtracking; with
    ``exact_line_search`` the step along each feasible direction is chosen
    in closed form (intended for convex Q, where it is globally optimal
    along the segment).  Monotone in f either way.

    Returns (x, f(x), kkt_residual, iterations).
    """
    q = np.asarray(quad, dtype=float)
    n = q.shape[0]
    c = np.zeros(n) if lin is None else np.asarray(lin, dtype=float)
    x = np.full(n, 1.0 / n) if x0 is None else project_to_simplex(x0)

    def f(v):
        return float(v @ q @ v + c @ v)

    fx = f(x)
    # gradient scale sets the projected-gradient trial step
    scale = max(1.0, float(np.abs(q).sum(axis=1).max() + np.abs(c).max()))
    step = 1.0 / scale
    it = 0
    for it in range(1, max_iter + 1):
        grad = 2.0 * (q @ x) + c
        y = project_to_simplex(x - step * grad)
        d = y - x
        gd = float(grad @ d)
        if gd > -1e-18:
            if kkt_residual(grad, x) <= tol:
                break
            step *= 0.5
            if step < 1e-18:
                break
            continue
        dqd = float(d @ q @ d)
        if exact_line_search and dqd > 0:
            t = min(1.0, -gd / (2.0 * dqd))
            x_new = x + t * d
            f_new = f(x_new)
            if f_new >= fx - 1e-18:
                break
            x, fx = x_new, f_new
        else:
            t = 1.0
            accepted = False
            while t > 1e-16:
                x_new = x + t * d
                f_new = f(x_new)
                if f_new <= fx + 1e-4 * t * gd:
                    x, fx = x_new, f_new
                    accepted = True
                    break
                t *= 0.5
            if not accepted:
                break
        if kkt_residual(2.0 * (q @ x) + c, x) <= tol:
            break
    grad = 2.0 * (q @ x) + c
    return x, fx, kkt_residual(grad, x), it


def maximize_quadratic_on_simplex(quad, lin=None, x0=None, tol=1e-10, max_iter=5000):
    """Maximize x' Q x + c' x (concave when Q is negative semidefinite)."""
    q = -np.asarray(quad, dtype=float)
    c = None if lin is None else -np.asarray(lin, dtype=float)
    x, fx, kkt, it = minimize_quadratic_on_simplex(
        q, c, x0, tol=tol, max_iter=max_iter, exact_line_search=True
    )
    return x, -fx, kkt, it

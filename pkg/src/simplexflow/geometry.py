"""Regular simplices, enclosing-ball radii, and rigid point-set alignment."""

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .measure import DiscreteMeasure

# permutation search cap for align_rigid before switching to assignment+ICP
_EXHAUSTIVE_LIMIT = 5040


@dataclass(frozen=True)
class SimplexSpec:
    """Vertex set of a regular k-simplex of diameter d embedded in R^n."""

    dim_ambient: int
    dim_simplex: int
    diameter: float
    vertices: np.ndarray  # (k+1, n)

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.shape != (self.dim_simplex + 1, self.dim_ambient):
            raise ValueError(f"expected {(self.dim_simplex + 1, self.dim_ambient)} vertices, got {v.shape}")
        d = self.diameter
        if not d > 0:
            raise ValueError(f"diameter must be positive, got {d}")
        diff = v[:, None, :] - v[None, :, :]
        dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
        iu = np.triu_indices(v.shape[0], k=1)
        if np.any(np.abs(dist[iu] - d) > 1e-10 * max(d, 1.0)):
            raise ValueError("vertices are not equidistant at the declared diameter")
        if self.dim_simplex == self.dim_ambient:
            span = np.linalg.matrix_rank(v[1:] - v[0], tol=1e-8 * d)
            if span != self.dim_ambient:
                raise ValueError("top-dimensional simplex must affinely span the space")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @property
    def center(self) -> np.ndarray:
        return self.vertices.mean(axis=0)


def make_unit_simplex(n: int, centered: bool = True) -> SimplexSpec:
    """Regular n-simplex with unit edges in R^n, built by apex lifting.

    Vertex k sits above the circumcenter of the first k vertices at height
    sqrt((k+1)/(2k)), which keeps every new pairwise distance at 1 up to
    roundoff.  With ``centered`` the barycenter is moved to the origin.
    """
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    v = np.zeros((n + 1, n))
    for k in range(1, n + 1):
        g = v[:k].mean(axis=0)
        v[k, : k - 1] = g[: k - 1]
        v[k, k - 1] = math.sqrt((k + 1) / (2.0 * k))
    if centered:
        v -= v.mean(axis=0)
        v -= v.mean(axis=0)
    return SimplexSpec(dim_ambient=n, dim_simplex=n, diameter=1.0, vertices=v)


def unit_simplex_measure(n: int) -> DiscreteMeasure:
    """Uniform measure on the vertices of the centered unit n-simplex."""
    spec = make_unit_simplex(n, centered=True)
    return DiscreteMeasure(spec.vertices)


def jung_radius(n: int) -> float:
    """Smallest radius enclosing every unit-diameter set in R^n: sqrt(n/(2n+2)).

    Equals the circumradius of the unit n-simplex; increases to 1/sqrt(2).
    """
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    return math.sqrt(n / (2.0 * n + 2.0))


def is_regular_simplex(points, tol: float = 1e-9) -> tuple[bool, float]:
    """Whether all pairwise distances agree within tol (relative to their mean).

    Returns (flag, mean pairwise distance).
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise ValueError("need at least two points")
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    d = float(dist[np.triu_indices(pts.shape[0], k=1)].mean())
    if d == 0.0:
        return False, 0.0
    ok = bool(np.all(np.abs(dist[np.triu_indices(pts.shape[0], k=1)] - d) <= tol * d))
    return ok, d


def reuleaux_membership(spec: SimplexSpec, x, delta: float = 0.0) -> bool:
    """Whether x lies in the intersection of balls of radius 1+delta at the vertices.

    A 1e-12 slack absorbs construction roundoff so the vertices themselves
    are always members at delta = 0.
    """
    if abs(spec.diameter - 1.0) > 1e-9:
        raise ValueError("membership region is defined for unit simplices")
    x = np.asarray(x, dtype=float)
    d = np.linalg.norm(spec.vertices - x, axis=1)
    return bool(np.all(d <= 1.0 + delta + 1e-12))


def a0_matrix(vertex_positions, i: int = 0) -> np.ndarray:
    """Sum of outer products of unit edge directions out of vertex i.

    For exact unit-simplex vertices the spectrum is {1/2 (multiplicity n-1),
    (n+1)/2 (simple)}, so the matrix dominates Id/min(n, 2).
    """
    pts = np.asarray(vertex_positions, dtype=float)
    if pts.ndim != 2 or pts.shape[0] != pts.shape[1] + 1:
        raise ValueError(f"need n+1 positions in R^n, got shape {pts.shape}")
    n = pts.shape[1]
    out = np.zeros((n, n))
    for j in range(pts.shape[0]):
        if j == i:
            continue
        u = pts[i] - pts[j]
        norm = np.linalg.norm(u)
        if norm == 0.0:
            raise ValueError(f"positions {i} and {j} coincide")
        u = u / norm
        out += np.outer(u, u)
    return out


def hilbert_identity_residual(vectors) -> float:
    """Residual of |sum y_i|^2 + sum_{i<j} |y_i - y_j|^2 = (k+1) sum |y_i|^2."""
    y = np.asarray(vectors, dtype=float)
    total = y.sum(axis=0)
    lhs = float(total @ total)
    diff = y[:, None, :] - y[None, :, :]
    lhs += 0.5 * float(np.einsum("ijk,ijk->", diff, diff))
    rhs = y.shape[0] * float(np.einsum("ij,ij->", y, y))
    return abs(lhs - rhs)


@dataclass
class AlignResult:
    rotation: np.ndarray
    translation: np.ndarray
    residual: float
    assignment: list[int]
    used_reflection: bool


def _weighted_procrustes(x, y, w, allow_reflections):
    """Best orthogonal R, translation t minimizing sum w_i |R x_i + t - y_i|^2."""
    xc = w @ x
    yc = w @ y
    xs = x - xc
    ys = y - yc
    h = (xs * w[:, None]).T @ ys
    u, _, vt = np.linalg.svd(h)
    r = vt.T @ u.T
    if not allow_reflections and np.linalg.det(r) < 0:
        d = np.ones(x.shape[1])
        d[-1] = -1.0
        r = vt.T @ np.diag(d) @ u.T
    t = yc - r @ xc
    res2 = float(w @ np.einsum("ij,ij->i", xs @ r.T - ys, xs @ r.T - ys))
    return r, t, math.sqrt(max(res2, 0.0))


def _weight_classes(weights, tol):
    order = np.argsort(weights, kind="stable")
    classes, current = [], [order[0]]
    for idx in order[1:]:
        if weights[idx] - weights[current[-1]] <= tol:
            current.append(idx)
        else:
            classes.append(current)
            current = [idx]
    classes.append(current)
    return classes


def align_rigid(
    mu_a: DiscreteMeasure,
    mu_b: DiscreteMeasure,
    allow_reflections: bool = True,
) -> AlignResult:
    """Best rigid motion (orthogonal by default, rotation-only on request)
    carrying mu_a onto mu_b over weight-compatible atom assignments.

    Small atom counts are matched exhaustively; larger ones fall back to
    Hungarian assignment alternated with Procrustes refinement.  The
    residual is the attained weighted RMS misfit.
    """
    if mu_a.dim != mu_b.dim:
        raise ValueError(f"dimension mismatch: {mu_a.dim} vs {mu_b.dim}")
    if mu_a.natoms != mu_b.natoms:
        raise ValueError(f"atom count mismatch: {mu_a.natoms} vs {mu_b.natoms}")
    wa = np.sort(mu_a.weights)
    wb = np.sort(mu_b.weights)
    if np.any(np.abs(wa - wb) > 1e-9):
        raise ValueError("sorted weight profiles disagree beyond 1e-9")

    x, y, w = mu_a.points, mu_b.points, mu_a.weights
    classes_a = _weight_classes(mu_a.weights, 1e-9)
    classes_b = _weight_classes(mu_b.weights, 1e-9)
    if [len(c) for c in classes_a] != [len(c) for c in classes_b]:
        # borderline tolerance chains split the profiles differently; fall
        # back to a single class (any assignment allowed)
        classes_a = [sorted(i for c in classes_a for i in c)]
        classes_b = [sorted(i for c in classes_b for i in c)]
    total_perms = 1
    for c in classes_a:
        total_perms *= math.factorial(len(c))

    best = None
    if total_perms <= _EXHAUSTIVE_LIMIT:
        for pieces in itertools.product(
            *(itertools.permutations(cb) for cb in classes_b)
        ):
            sigma = np.empty(mu_a.natoms, dtype=int)
            for ca, cb in zip(classes_a, pieces):
                for src, dst in zip(ca, cb):
                    sigma[src] = dst
            r, t, res = _weighted_procrustes(x, y[sigma], w, allow_reflections)
            if best is None or res < best[2]:
                best = (r, t, res, sigma)
    else:
        # assignment/Procrustes alternation from a few deterministic seeds
        seeds = [np.eye(mu_a.dim)]
        rng = np.random.default_rng(0)
        for _ in range(3):
            q, _ = np.linalg.qr(rng.standard_normal((mu_a.dim, mu_a.dim)))
            seeds.append(q)
        block = np.zeros((mu_a.natoms, mu_a.natoms))
        for ca in classes_a:
            mask = np.ones(mu_a.natoms, dtype=bool)
            for cb in classes_b:
                if abs(mu_a.weights[ca[0]] - mu_b.weights[cb[0]]) <= 1e-9:
                    mask[cb] = False
            block[np.ix_(ca, np.where(mask)[0])] = np.inf
        for r0 in seeds:
            r, t = r0, mu_b.barycenter() - r0 @ mu_a.barycenter()
            sigma = None
            for _ in range(50):
                moved = x @ r.T + t
                cost = np.einsum("ijk,ijk->ij", moved[:, None] - y[None], moved[:, None] - y[None])
                rows, cols = linear_sum_assignment(cost + block)
                new_sigma = cols[np.argsort(rows)]
                if sigma is not None and np.array_equal(new_sigma, sigma):
                    break
                sigma = new_sigma
                r, t, res = _weighted_procrustes(x, y[sigma], w, allow_reflections)
            r, t, res = _weighted_procrustes(x, y[sigma], w, allow_reflections)
            if best is None or res < best[2]:
                best = (r, t, res, sigma)

    r, t, res, sigma = best
    return AlignResult(
        rotation=r,
        translation=t,
        residual=res,
        assignment=[int(s) for s in sigma],
        used_reflection=bool(np.linalg.det(r) < 0),
    )

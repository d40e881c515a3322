"""Desk-scale search for global energy minimizers over discrete measures.

Pipeline per restart: sample atoms uniformly in a ball, run the
aggregation flow to a velocity tolerance, merge the resulting clusters,
then polish the collapsed configuration by alternating position descent
with weight optimization on the probability simplex (the energy is a
quadratic form in the weights at fixed positions).  The lowest-energy
restart wins.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import FlowConfig, FlowTrace, flow
from .energy import energy, energy_gradient, euler_lagrange_residual, weight_gram
from .geometry import is_regular_simplex
from .kernel import PowerLawParams, eval_w, radius_R
from .measure import DiscreteMeasure, collapse_clusters
from .simplex_qp import minimize_quadratic_on_simplex

SIMPLEX_FLAG_TOL = 1e-3
EL_CONVERGENCE_TOL = 1e-6


@dataclass
class MinimizeConfig:
    n: int
    atoms: int
    restarts: int = 8
    init_radius: float | None = None  # default: zero radius R of the profile
    cluster_tol: float = 0.02
    polish_iters: int = 40
    seed: int = 0
    flow: FlowConfig = field(
        default_factory=lambda: FlowConfig(dt_init=0.1, t_max=150.0, grad_tol=1e-7, record_every=50)
    )

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"dimension must be >= 1, got {self.n}")
        if self.atoms < self.n + 1:
            raise ValueError(f"need at least n+1 = {self.n + 1} atoms, got {self.atoms}")
        if self.restarts < 1:
            raise ValueError(f"restarts must be >= 1, got {self.restarts}")
        if self.cluster_tol < 0:
            raise ValueError(f"cluster_tol must be nonnegative, got {self.cluster_tol}")


@dataclass
class MinimizerReport:
    best: DiscreteMeasure
    energy: float
    atom_count_after_collapse: int
    is_unit_simplex: bool
    mass_profile: list[float]
    diam: float
    el_residual: float
    candidate_min: float
    converged: bool
    restarts_failed: int

    def to_dict(self) -> dict:
        return {
            "best": self.best.to_dict(),
            "energy": self.energy,
            "atom_count_after_collapse": self.atom_count_after_collapse,
            "is_unit_simplex": self.is_unit_simplex,
            "mass_profile": list(self.mass_profile),
            "diam": self.diam,
            "el_residual": self.el_residual,
            "candidate_min": self.candidate_min,
            "converged": self.converged,
            "restarts_failed": self.restarts_failed,
        }


def _sample_ball(rng, count, n, radius):
    """Uniform sample in the n-ball of the given radius."""
    x = rng.standard_normal((count, n))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    u = rng.random(count) ** (1.0 / n)
    return radius * x * u[:, None]


def _position_descent(pts, wts, params, threads, max_steps=200, gtol=1e-11):
    """Armijo gradient descent on atom positions at fixed weights."""
    mu = DiscreteMeasure(pts, wts)
    e = energy(mu, params, threads)
    step = 0.5
    for _ in range(max_steps):
        g = energy_gradient(mu, params, threads)
        gnorm2 = float(np.einsum("ij,ij->", g, g))
        if math.sqrt(gnorm2) < gtol:
            break
        accepted = False
        while step > 1e-18:
            cand = DiscreteMeasure(mu.points - step * g, wts)
            e_new = energy(cand, params, threads)
            if e_new <= e - 1e-4 * step * gnorm2:
                mu, e = cand, e_new
                accepted = True
                step = min(step * 2.0, 1e3)
                break
            step *= 0.5
        if not accepted:
            break
    return np.array(mu.points, copy=True), e


def _weight_descent(pts, wts, params, threads):
    """Projected-gradient weight optimization; never increases the energy.

    A terminal equality-KKT solve on the active support sharpens the PG
    iterate to machine precision (PG alone stalls once the quadratic
    improvement drops under roundoff).
    """
    gram = weight_gram(pts, params, threads)
    e_old = float(wts @ gram @ wts)
    w_new, e_new, _kkt, _ = minimize_quadratic_on_simplex(gram, x0=wts, tol=1e-13)
    if e_new > e_old + 1e-12 * (1.0 + abs(e_old)):
        return np.array(wts, copy=True)

    support = np.where(w_new > 1e-12)[0]
    k = support.size
    kkt_mat = np.zeros((k + 1, k + 1))
    kkt_mat[:k, :k] = 2.0 * gram[np.ix_(support, support)]
    kkt_mat[:k, k] = 1.0
    kkt_mat[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    try:
        sol = np.linalg.solve(kkt_mat, rhs)
    except np.linalg.LinAlgError:
        return w_new
    w_exact = np.zeros_like(w_new)
    w_exact[support] = sol[:k]
    if np.any(w_exact < 0.0) or abs(w_exact.sum() - 1.0) > 1e-12:
        return w_new
    e_exact = float(w_exact @ gram @ w_exact)
    if e_exact <= e_new + 1e-15 * (1.0 + abs(e_new)):
        return w_exact
    return w_new


def _polish(mu: DiscreteMeasure, params, iters, threads):
    pts = np.array(mu.points, copy=True)
    wts = np.array(mu.weights, copy=True)
    e_prev = energy(mu, params, threads)
    for _ in range(iters):
        pts, _ = _position_descent(pts, wts, params, threads)
        wts = _weight_descent(pts, wts, params, threads)
        e_now = energy(DiscreteMeasure(pts, wts), params, threads)
        if e_prev - e_now < 1e-15 * (1.0 + abs(e_prev)):
            e_prev = e_now
            break
        e_prev = e_now
    return DiscreteMeasure(pts, wts), e_prev


def minimize_global(params: PowerLawParams, cfg: MinimizeConfig, threads=None) -> MinimizerReport:
    """Best-of-restarts minimization; see the module docstring for the pipeline.

    Restart k draws from an independent stream seeded by (seed, k), so
    results do not depend on execution order.
    """
    if params.hard:
        raise ValueError("search needs a finite attraction exponent")
    if params.beta < 2.0 or not params.alpha > params.beta:
        raise ValueError(f"need alpha > beta >= 2, got ({params.alpha}, {params.beta})")
    radius = cfg.init_radius if cfg.init_radius is not None else radius_R(params)

    best_mu: DiscreteMeasure | None = None
    best_e = math.inf
    failed = 0
    for k in range(cfg.restarts):
        rng = np.random.default_rng([cfg.seed, k])
        pts = _sample_ball(rng, cfg.atoms, cfg.n, radius)
        mu0 = DiscreteMeasure(pts)
        trace: FlowTrace = flow(mu0, params, cfg.flow, seed=cfg.seed, threads=threads)
        if trace.terminated_by == "step_failure":
            failed += 1
            continue
        collapsed = collapse_clusters(trace.final, cfg.cluster_tol)
        polished, e = _polish(collapsed, params, cfg.polish_iters, threads)
        if e < best_e:
            best_mu, best_e = polished, e
    if best_mu is None:
        raise RuntimeError(f"all {cfg.restarts} restarts failed")

    best_mu = collapse_clusters(best_mu, min(cfg.cluster_tol, 1e-6)).center()
    best_e = energy(best_mu, params, threads)
    diam = best_mu.diameter()
    k_atoms = best_mu.natoms
    simplex_flag = False
    if k_atoms == cfg.n + 1:
        ok, _d = is_regular_simplex(best_mu.points, tol=SIMPLEX_FLAG_TOL)
        simplex_flag = bool(ok and abs(_d - 1.0) <= SIMPLEX_FLAG_TOL)
    el = euler_lagrange_residual(best_mu, params, threads=threads)
    candidates = energy_of_candidates(params, cfg.n)
    candidate_min = min(row["energy"] for row in candidates)
    converged = (
        el.spread <= EL_CONVERGENCE_TOL
        and best_e <= candidate_min + 1e-9 * (1.0 + abs(candidate_min))
    )
    return MinimizerReport(
        best=best_mu,
        energy=best_e,
        atom_count_after_collapse=k_atoms,
        is_unit_simplex=simplex_flag,
        mass_profile=sorted(float(w) for w in best_mu.weights),
        diam=diam,
        el_residual=el.spread,
        candidate_min=candidate_min,
        converged=converged,
        restarts_failed=failed,
    )


def _sphere_points(n, count, seed=0):
    """Deterministic quasi-uniform points on the unit sphere in R^n."""
    if n == 1:
        return np.array([[-1.0], [1.0]])
    if n == 2:
        theta = 2.0 * math.pi * np.arange(count) / count
        return np.column_stack([np.cos(theta), np.sin(theta)])
    if n == 3:
        # Fibonacci spiral
        i = np.arange(count) + 0.5
        phi = math.pi * (3.0 - math.sqrt(5.0)) * i
        z = 1.0 - 2.0 * i / count
        r = np.sqrt(np.maximum(1.0 - z * z, 0.0))
        return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((count, n))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def _golden_section(fn, lo, hi, iters=80):
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = fn(d)
    return (a + b) / 2.0


def energy_of_candidates(params: PowerLawParams, n: int, sphere_atoms: int = 720, seed: int = 0):
    """Reference energies: uniform unit simplex, optimized-radius sphere
    shell, and a single atom.

    Returns a list of {"name", "energy", ...} rows for comparison against
    search output.
    """
    if params.hard or params.beta < 2.0 or not params.alpha > params.beta:
        raise ValueError("candidates need finite alpha > beta >= 2")
    rows = []
    simplex_e = n / (n + 1.0) * eval_w(params, 1.0)
    rows.append({"name": "uniform-simplex", "energy": simplex_e, "atoms": n + 1})

    shell = _sphere_points(n, sphere_atoms if n > 1 else 2, seed)
    k = shell.shape[0]
    wts = np.full(k, 1.0 / k)
    diff = shell[:, None, :] - shell[None, :, :]
    dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    iu = np.triu_indices(k, 1)
    d = dist[iu]
    pair_w = wts[iu[0]] * wts[iu[1]]
    a_term = 2.0 * float(pair_w @ np.power(d, params.alpha)) / params.alpha
    b_term = 2.0 * float(pair_w @ np.power(d, params.beta)) / params.beta

    def shell_energy(r):
        return a_term * r**params.alpha - b_term * r**params.beta

    r_hi = max(2.0, radius_R(params))
    r_best = _golden_section(shell_energy, 1e-3, r_hi)
    rows.append(
        {
            "name": "sphere",
            "energy": shell_energy(r_best),
            "radius": r_best,
            "atoms": k,
        }
    )
    rows.append({"name": "single-atom", "energy": 0.0, "atoms": 1})
    return rows


def uniform_simplex_energy(params: PowerLawParams, n: int) -> float:
    """Closed form n/(n+1) * w(1) for the uniform unit-simplex measure."""
    return n / (n + 1.0) * eval_w(params, 1.0)

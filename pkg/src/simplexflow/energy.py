"""Interaction energy, its gradient in atom positions, and optimality residuals.

The energy of a discrete measure mu = sum m_i delta_{x_i} under a pair
potential W is the double sum E(mu) = sum_{i,j} m_i m_j W(x_i - x_j),
counting both orderings; the diagonal contributes nothing since W(0) = 0.
At a minimizer the convolution potential V = mu * W is constant on the
support and at least that constant everywhere else, which gives a cheap
numerical certificate of criticality.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .kernel import PowerLawParams
from .measure import DiscreteMeasure


@dataclass
class EnergyReport:
    """Energy value with the convolution potential sampled at the atoms."""

    value: float
    potential_at_atoms: list[float]
    el_residual: float

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "potential_at_atoms": list(self.potential_at_atoms),
            "el_residual": self.el_residual,
        }


@dataclass
class ELResidual:
    """Criticality diagnostics from the first-order optimality condition.

    spread:  max_i V(x_i) - min_i V(x_i)  (0 at any critical measure)
    deficit: max(0, E(mu) - min_i V(x_i))
    probe_violations: off-support probe points where V drops below the
        on-support minimum by more than the probe tolerance, each as
        (probe, V(probe)); nonempty means mu is not a minimizer.
    """

    spread: float
    deficit: float
    probe_violations: list[tuple[list[float], float]] = field(default_factory=list)


def energy(mu: DiscreteMeasure, params: PowerLawParams, threads=None) -> float:
    """E(mu); +inf in the hard-wall case iff the support has diameter > 1."""
    return _backend.pair_energy(
        mu.points, mu.weights, params.alpha, params.beta, params.hard, threads
    )


def power_moment_energy(mu: DiscreteMeasure, p: float, threads=None) -> float:
    """Energy under the single power law |x|**p / p.

    For p = 2 this equals the variance of mu about its barycenter.
    """
    if p <= 0:
        raise ValueError(f"exponent must be positive, got {p}")
    return _backend.power_moment_energy(mu.points, mu.weights, p, threads)


def energy_gradient(mu: DiscreteMeasure, params: PowerLawParams, threads=None) -> np.ndarray:
    """Gradient of E in the atom positions: g_i = 2 m_i sum_{j!=i} m_j grad W(x_i - x_j)."""
    if params.hard:
        raise ValueError("position gradient needs a finite attraction exponent")
    if params.beta < 2.0:
        raise ValueError(f"position gradient needs beta >= 2, got {params.beta}")
    g = _backend.field_gradient(mu.points, mu.weights, params.alpha, params.beta, threads)
    return 2.0 * mu.weights[:, None] * g


def potential_field(mu: DiscreteMeasure, params: PowerLawParams, x) -> float:
    """Convolution potential (mu * W)(x) = sum_j m_j w(|x - x_j|)."""
    x = np.asarray(x, dtype=float).reshape(1, -1)
    if x.shape[1] != mu.dim:
        raise ValueError(f"point has dim {x.shape[1]}, measure has dim {mu.dim}")
    return float(
        _backend.potential_values(
            mu.points, mu.weights, params.alpha, params.beta, params.hard, x
        )[0]
    )


def potential_at(mu: DiscreteMeasure, params: PowerLawParams, targets, threads=None) -> np.ndarray:
    """Vectorized convolution potential at a batch of target points."""
    tgt = np.asarray(targets, dtype=float)
    if tgt.ndim == 1:
        tgt = tgt.reshape(1, -1)
    return _backend.potential_values(
        mu.points, mu.weights, params.alpha, params.beta, params.hard, tgt, threads
    )


def _default_probes(mu: DiscreteMeasure) -> np.ndarray:
    # pair midpoints, pair extrapolations, and the barycenter: cheap places
    # to catch a potential dip (tight pairs dip outside themselves, not
    # between, so the extrapolated probes matter)
    pts = mu.points
    iu = np.triu_indices(mu.natoms, k=1)
    if iu[0].size:
        mids = 0.5 * (pts[iu[0]] + pts[iu[1]])
        outer_a = pts[iu[0]] + 0.5 * (pts[iu[0]] - pts[iu[1]])
        outer_b = pts[iu[1]] + 0.5 * (pts[iu[1]] - pts[iu[0]])
        probes = np.vstack([mids, outer_a, outer_b])
    else:
        probes = np.empty((0, mu.dim))
    return np.vstack([probes, mu.barycenter()[None, :]])


def euler_lagrange_residual(
    mu: DiscreteMeasure,
    params: PowerLawParams,
    probes=None,
    probe_tol: float = 1e-9,
    threads=None,
) -> ELResidual:
    """First-order optimality residuals plus an off-support probe scan."""
    if params.hard:
        raise ValueError("residual needs a finite attraction exponent")
    v_atoms = potential_at(mu, params, mu.points, threads)
    v_min = float(v_atoms.min())
    spread = float(v_atoms.max()) - v_min
    e = energy(mu, params, threads)
    deficit = max(0.0, e - v_min)
    probe_pts = _default_probes(mu) if probes is None else np.asarray(probes, dtype=float)
    violations = []
    if probe_pts.size:
        v_probe = potential_at(mu, params, probe_pts, threads)
        for p, v in zip(probe_pts, v_probe):
            if v < v_min - probe_tol:
                violations.append((p.tolist(), float(v)))
    return ELResidual(spread, deficit, violations)


def energy_report(mu: DiscreteMeasure, params: PowerLawParams, threads=None) -> EnergyReport:
    v_atoms = potential_at(mu, params, mu.points, threads)
    return EnergyReport(
        value=energy(mu, params, threads),
        potential_at_atoms=[float(v) for v in v_atoms],
        el_residual=float(v_atoms.max() - v_atoms.min()),
    )


def jensen_moment_check(mu: DiscreteMeasure, alpha: float, beta: float) -> bool:
    """Moment comparison (b E_b)^(1/b) <= (a E_a)^(1/a) for a > b >= 2.

    E_p denotes the single power-law energy; holds with 1e-10 relative slack.
    """
    if not alpha > beta or beta < 2.0:
        raise ValueError(f"need alpha > beta >= 2, got ({alpha}, {beta})")
    lhs = (beta * power_moment_energy(mu, beta)) ** (1.0 / beta)
    rhs = (alpha * power_moment_energy(mu, alpha)) ** (1.0 / alpha)
    return lhs <= rhs * (1.0 + 1e-10)


def velocity_field(mu: DiscreteMeasure, params: PowerLawParams, threads=None) -> np.ndarray:
    """Aggregation velocity at each atom: v_i = -sum_{j != i} m_j grad W(x_i - x_j)."""
    if params.hard:
        raise ValueError("velocity field needs a finite attraction exponent")
    return -_backend.field_gradient(mu.points, mu.weights, params.alpha, params.beta, threads)


def weight_gram(mu_points, params: PowerLawParams, threads=None) -> np.ndarray:
    """G[i, j] = w(|x_i - x_j|), zero diagonal; E = m' G m at fixed positions."""
    return _backend.gram_matrix(mu_points, params.alpha, params.beta, params.hard, threads)

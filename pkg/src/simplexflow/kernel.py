"""Power-law pair potentials and their radial profiles.

The interaction combines power-law attraction (exponent ``alpha``) with
power-law repulsion (exponent ``beta``), scaled so the radial profile

    w(r) = r**alpha / alpha - r**beta / beta

is minimized exactly at unit separation, with w(1) = 1/alpha - 1/beta < 0.
Taking the attraction exponent to infinity replaces the attractive tail by
a hard wall at unit distance: w(r) = -r**beta / beta for r <= 1 and +inf
beyond.
"""

import math
from dataclasses import dataclass

import numpy as np

# Separations within this slack of the unit cutoff count as confined in the
# hard-wall limit; absorbs roundoff in constructed unit-distance geometry.
HARD_CUTOFF_TOL = 1e-12


@dataclass(frozen=True)
class PowerLawParams:
    """Exponent pair (alpha, beta) with alpha >= beta, beta > 0.

    The hard-wall limit alpha -> infinity is carried by the explicit
    ``hard`` flag; all evaluation branches on the flag, never on an
    infinite float.  ``PowerLawParams(math.inf, beta)`` normalizes to the
    flagged form.
    """

    alpha: float
    beta: float
    hard: bool = False

    def __post_init__(self):
        alpha = float(self.alpha)
        beta = float(self.beta)
        if not beta > 0.0 or math.isinf(beta) or math.isnan(beta):
            raise ValueError(f"repulsion exponent must satisfy beta > 0, got {beta}")
        if math.isnan(alpha):
            raise ValueError("attraction exponent is NaN")
        hard = bool(self.hard) or math.isinf(alpha)
        if hard:
            alpha = math.inf
        elif alpha < beta:
            raise ValueError(
                f"attraction must dominate repulsion: alpha={alpha} < beta={beta}"
            )
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "hard", hard)

    @classmethod
    def hard_confinement(cls, beta: float) -> "PowerLawParams":
        """Hard-wall kernel: repulsion exponent beta, wall at unit distance."""
        return cls(math.inf, beta, hard=True)

    @property
    def is_null(self) -> bool:
        """True for the degenerate case alpha == beta (w identically zero)."""
        return not self.hard and self.alpha == self.beta


def eval_w(params: PowerLawParams, r: float) -> float:
    """Radial profile w(r) at a single separation r >= 0.

    Hard case: -r**beta/beta for r <= 1 (up to HARD_CUTOFF_TOL), +inf beyond.
    """
    r = float(r)
    if r < 0.0:
        raise ValueError(f"separation must be nonnegative, got {r}")
    if r == 0.0:
        return 0.0
    if params.hard:
        if r > 1.0 + HARD_CUTOFF_TOL:
            return math.inf
        return -(r ** params.beta) / params.beta
    return (r ** params.alpha) / params.alpha - (r ** params.beta) / params.beta


def radial_profile(params: PowerLawParams, r: np.ndarray) -> np.ndarray:
    """Vectorized eval_w over an array of nonnegative separations."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0.0):
        raise ValueError("separations must be nonnegative")
    beta = params.beta
    if params.hard:
        out = -np.power(r, beta) / beta
        return np.where(r > 1.0 + HARD_CUTOFF_TOL, np.inf, out)
    return np.power(r, params.alpha) / params.alpha - np.power(r, beta) / beta


def eval_grad(params: PowerLawParams, x: np.ndarray) -> np.ndarray:
    """Gradient of W(x) = w(|x|): returns (|x|**(a-2) - |x|**(b-2)) * x.

    Requires a finite attraction exponent.  At the origin the gradient is
    zero provided beta >= 2 (flat repulsion); beta < 2 is rejected there.
    """
    if params.hard:
        raise ValueError("gradient undefined in the hard-confinement limit")
    x = np.asarray(x, dtype=float)
    r = float(np.linalg.norm(x))
    if r == 0.0:
        if params.beta < 2.0:
            raise ValueError(f"gradient undefined at 0 for beta={params.beta} < 2")
        return np.zeros_like(x)
    factor = r ** (params.alpha - 2.0) - r ** (params.beta - 2.0)
    return factor * x


def radius_R(params: PowerLawParams, allow_hard_limit: bool = False) -> float:
    """Unique positive zero of w: R = (alpha/beta)**(1/(alpha-beta)).

    Decreases to 1 as alpha grows; the degenerate case alpha == beta returns
    the limit exp(1/beta).  The hard-wall value 1 is only returned when
    explicitly requested via ``allow_hard_limit``.
    """
    if params.hard:
        if allow_hard_limit:
            return 1.0
        raise ValueError("R is a limit (=1) in the hard-confinement case")
    if params.alpha == params.beta:
        return math.exp(1.0 / params.beta)
    return (params.alpha / params.beta) ** (1.0 / (params.alpha - params.beta))


def split_short_long(params: PowerLawParams, r: float) -> tuple[float, float]:
    """Split w(r) into a bounded short-range part and a nonnegative tail.

    The short-range part clamps at the unit-separation value:
    w_le(r) = w(min(r, 1)); the remainder w_gt = w - w_le vanishes on [0, 1]
    and is nonnegative everywhere.
    """
    if params.hard:
        raise ValueError("short/long split needs a finite attraction exponent")
    r = float(r)
    if r < 0.0:
        raise ValueError(f"separation must be nonnegative, got {r}")
    w_le = eval_w(params, min(r, 1.0))
    w_gt = eval_w(params, r) - w_le if r > 1.0 else 0.0
    return w_le, w_gt

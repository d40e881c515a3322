"""Attractive-repulsive interaction energies over discrete probability measures.

Subpackages cover kernel evaluation, measure statistics, energy and its
gradient, simplex geometry, exact transport metrics, the aggregation flow,
global minimization, and numerical theorem checks.  Hot pair kernels run
on a compiled core when built, with a NumPy fallback selected at import.
"""

from . import (  # noqa: F401
    dynamics,
    energy,
    geometry,
    kernel,
    measure,
    minimize,
    transport,
    verify,
)
from ._backend import backend_name, get_num_threads, have_compiled, set_num_threads
from .dynamics import FlowConfig, FlowTrace, flow
from .geometry import SimplexSpec, jung_radius, make_unit_simplex, unit_simplex_measure
from .kernel import PowerLawParams, eval_grad, eval_w, radius_R, split_short_long
from .measure import DiscreteMeasure, collapse_clusters
from .minimize import MinimizeConfig, MinimizerReport, energy_of_candidates, minimize_global
from .transport import (
    CouplingPlan,
    distance_to_simplex_family,
    wasserstein_inf,
    wasserstein_p,
)
from .verify import (
    PerturbationConfig,
    ThresholdEstimate,
    descent_direction_search,
    gamma_convergence_experiment,
    isodiametric_sweep,
    local_min_perturbation_test,
    max_variance_given_support,
    scan_local_threshold,
    vertex_potential_argmin,
)

__version__ = "0.1.0"

__all__ = [
    "PowerLawParams",
    "DiscreteMeasure",
    "SimplexSpec",
    "FlowConfig",
    "FlowTrace",
    "MinimizeConfig",
    "MinimizerReport",
    "CouplingPlan",
    "PerturbationConfig",
    "ThresholdEstimate",
    "eval_w",
    "eval_grad",
    "radius_R",
    "split_short_long",
    "collapse_clusters",
    "make_unit_simplex",
    "unit_simplex_measure",
    "jung_radius",
    "flow",
    "minimize_global",
    "energy_of_candidates",
    "wasserstein_p",
    "wasserstein_inf",
    "distance_to_simplex_family",
    "max_variance_given_support",
    "isodiametric_sweep",
    "vertex_potential_argmin",
    "local_min_perturbation_test",
    "descent_direction_search",
    "scan_local_threshold",
    "gamma_convergence_experiment",
    "backend_name",
    "have_compiled",
    "set_num_threads",
    "get_num_threads",
    "__version__",
]

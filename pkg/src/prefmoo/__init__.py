"""Preference-steered decomposition multi-objective optimization toolkit."""

__version__ = "0.1.0"

from .lattice import (
    ReferenceSet,
    generate_das_dennis,
    generate_multilayer,
    project_to_simplex,
    read_dat,
    write_dat,
)
from .mapping import (
    RoiSpec,
    boundary_intersection,
    compute_eta,
    map_multi_roi,
    map_multilayer,
    map_point,
    map_reference_set,
    shift_boundary_point,
)
from .metrics import RMetricConfig, hv_exact, hv_monte_carlo, igd, r_hv, r_igd
from .optimizer import run as run_optimizer
from .problems import ProblemSpec, evaluate, make_problem, sample_pf, theoretical_optimum

__all__ = [
    "ReferenceSet",
    "RoiSpec",
    "RMetricConfig",
    "ProblemSpec",
    "boundary_intersection",
    "compute_eta",
    "evaluate",
    "generate_das_dennis",
    "generate_multilayer",
    "hv_exact",
    "hv_monte_carlo",
    "igd",
    "make_problem",
    "map_multi_roi",
    "map_multilayer",
    "map_point",
    "map_reference_set",
    "project_to_simplex",
    "r_hv",
    "r_igd",
    "read_dat",
    "run_optimizer",
    "sample_pf",
    "shift_boundary_point",
    "theoretical_optimum",
    "write_dat",
]

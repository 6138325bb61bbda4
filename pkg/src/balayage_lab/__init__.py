"""Numerical potential theory on atomic measures.

Kernels and potentials with extended-real arithmetic, discrete signed
measures, grid geometry with inward filling, harmonic measure and Green's
functions for balls, walk-on-spheres sampling, balayage order checks,
generalized Poisson-Jensen residuals, and the measure-potential duality
maps, plus a scenario-runner CLI (``balayage-lab``).
"""

from .balayage import (
    BalayageReport,
    EquivalenceViolation,
    check_har_balayage,
    check_har_test_functions,
    check_sbh_balayage,
    main_lemma_harness,
)
from .classical_domains import (
    BallDomain,
    WalkRestartOverflow,
    WosConfig,
    green_ball,
    harmonic_measure_quadrature,
    poisson_density,
    walk_on_spheres,
)
from .duality import (
    ASPotential,
    MfsFit,
    forward_map,
    inverse_map,
    mfs_fit,
    ring_sources,
)
from .geometry import (
    Box,
    CellSet,
    GridOpenSet,
    components,
    full_box_grid,
    grid_covering,
    inward_fill,
    is_relatively_compact,
    load_mask,
    rasterize_support,
    save_mask,
)
from .kernels import (
    DIAGONAL_RTOL,
    InfinityConflictError,
    ext_add,
    ext_sum,
    radial_kernel,
    riesz_constant,
    spatial_kernel,
)
from .measures import DiscreteMeasure, Mass, combine, dirac
from .poisson_jensen import (
    CanonicalSubharmonic,
    PJReport,
    asj_pj_residual,
    asp_pj_residual,
    classical_pj_residual,
    eval_subharmonic,
    measure_pj_residual,
    symmetric_pj_residual,
)
from .potentials import (
    PotentialValue,
    asymptotic_deviation,
    potential,
    potential_1d_closed,
    potential_values,
    spherical_mean,
)
from .sampling import sphere_points, unit_directions

__version__ = "0.1.0"

__all__ = [
    "ASPotential",
    "BalayageReport",
    "BallDomain",
    "Box",
    "CanonicalSubharmonic",
    "CellSet",
    "DIAGONAL_RTOL",
    "DiscreteMeasure",
    "EquivalenceViolation",
    "GridOpenSet",
    "InfinityConflictError",
    "Mass",
    "MfsFit",
    "PJReport",
    "PotentialValue",
    "WalkRestartOverflow",
    "WosConfig",
    "asj_pj_residual",
    "asp_pj_residual",
    "asymptotic_deviation",
    "check_har_balayage",
    "check_har_test_functions",
    "check_sbh_balayage",
    "classical_pj_residual",
    "combine",
    "components",
    "dirac",
    "eval_subharmonic",
    "ext_add",
    "ext_sum",
    "forward_map",
    "full_box_grid",
    "green_ball",
    "grid_covering",
    "harmonic_measure_quadrature",
    "inverse_map",
    "inward_fill",
    "is_relatively_compact",
    "load_mask",
    "main_lemma_harness",
    "measure_pj_residual",
    "mfs_fit",
    "poisson_density",
    "potential",
    "potential_1d_closed",
    "potential_values",
    "radial_kernel",
    "rasterize_support",
    "riesz_constant",
    "ring_sources",
    "save_mask",
    "spatial_kernel",
    "spherical_mean",
    "sphere_points",
    "symmetric_pj_residual",
    "unit_directions",
    "walk_on_spheres",
]

"""Entropy minimization under linear moment constraints, with Lagrange
multiplier certificates of optimality."""

__version__ = "0.1.0"

from .certificate import (
    CertificateOptions,
    CertificateStatus,
    best_multipliers,
    certify,
    check_interiority,
    directional_derivative,
    lmm_residual,
    sample_feasible_directions,
)
from .dual import (
    SolveReport,
    SolverOptions,
    init_multipliers,
    jacobian,
    link_density,
    moment_map,
    solve,
)
from .entropy import (
    FAMILIES,
    EntropyFunction,
    conj_prime,
    conj_prime_deriv,
    get_entropy,
    phi_eval,
    phi_prime,
)
from .errors import *  # noqa: F401,F403
from .extreal import ext_add, ext_mul
from .measure import (
    DiscretizedMeasure,
    build_counting_grid,
    build_interval_grid,
    build_real_line_grid,
    entropy_value,
    integrate,
)
from .oracle import OracleOptions, affine_project, compare, primal_solve
from .problem import (
    Basis,
    FeasibilityVerdict,
    MomentProblem,
    classify_gaussian_feasibility,
    feasibility_residual,
    gaussian_solution,
    holder_bound,
    mean_variance_targets,
    moments,
    monomial,
    tabulated,
)

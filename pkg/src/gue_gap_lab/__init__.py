"""gue-gap-lab: finite-n GUE gap probabilities with verified structure.

The package computes the probability P(n, a) that an n x n Gaussian
unitary ensemble matrix has no eigenvalue in (-a, a), working through the
orthogonal polynomials of the Gaussian weight with the interval (-a, a)
removed.  Everything runs in certified arbitrary precision, and the
recurrence, difference and differential equations satisfied by the edge
quantities are checked as numerical residuals rather than assumed.
"""

from .exceptions import (
    BranchSelectionError,
    ConvergenceError,
    DegenerateDenominatorError,
    DerivativeAccuracyError,
    DomainError,
    EdgeZeroError,
    GapLabError,
    IllConditioningError,
    PoleProximityError,
    PrecisionExhaustedError,
    QuadratureConvergenceError,
)
from .precision import (
    PrecisionPolicy,
    Real,
    complete_gamma,
    erfc,
    lower_incomplete_gamma,
    upper_incomplete_gamma,
)
from .weight import GapWeight, moment, seed_R0, seed_r1, zeroth_moment
from .orthopoly import (
    EdgeEval,
    RecurrenceTable,
    build_recurrence_table,
    edge_eval,
    hankel_det,
    hermite_beta_exact,
    hermite_norm_exact,
    log_hankel_det,
    poly_eval,
    poly_values,
    subleading_coeff,
)
from .ladder import (
    LadderState,
    default_z_samples,
    ladder_states,
    residual_identities,
    residual_supplementary,
)
from .difference_eqs import (
    BranchChoice,
    DiscreteOrbit,
    iterate_r_orbit,
    residual_R_recurrence,
    residual_alternate_r,
    residual_orbit_vs_direct,
    residual_sigma_recurrence,
    select_r_branch,
)
from .differential_eqs import (
    AGrid,
    build_a_grid,
    continuous_suite,
    convergence_study,
    fd_derivative,
    residual_chazy,
    residual_derivative_identities,
    residual_painleve4,
    residual_riccati,
    residual_sigma_form,
)
from .probability import (
    ProbabilityRecord,
    gap_probability_fredholm,
    gap_probability_hankel,
    gauss_legendre_rule,
    hermite_function_values,
    overlap_matrix,
    probability_record,
    residual_oracle,
)
from .report import ResidualCheck, ResidualReport, all_pass, relative_residual, sci_str

__version__ = "0.1.0"

__all__ = [
    "AGrid",
    "BranchChoice",
    "BranchSelectionError",
    "ConvergenceError",
    "DegenerateDenominatorError",
    "DerivativeAccuracyError",
    "DiscreteOrbit",
    "DomainError",
    "EdgeEval",
    "EdgeZeroError",
    "GapLabError",
    "GapWeight",
    "IllConditioningError",
    "LadderState",
    "PoleProximityError",
    "PrecisionExhaustedError",
    "PrecisionPolicy",
    "ProbabilityRecord",
    "QuadratureConvergenceError",
    "Real",
    "RecurrenceTable",
    "ResidualCheck",
    "ResidualReport",
    "all_pass",
    "build_a_grid",
    "build_recurrence_table",
    "complete_gamma",
    "continuous_suite",
    "convergence_study",
    "default_z_samples",
    "edge_eval",
    "erfc",
    "fd_derivative",
    "gap_probability_fredholm",
    "gap_probability_hankel",
    "gauss_legendre_rule",
    "hankel_det",
    "hermite_beta_exact",
    "hermite_function_values",
    "hermite_norm_exact",
    "iterate_r_orbit",
    "ladder_states",
    "log_hankel_det",
    "lower_incomplete_gamma",
    "moment",
    "overlap_matrix",
    "poly_eval",
    "poly_values",
    "probability_record",
    "relative_residual",
    "residual_R_recurrence",
    "residual_alternate_r",
    "residual_chazy",
    "residual_derivative_identities",
    "residual_identities",
    "residual_oracle",
    "residual_orbit_vs_direct",
    "residual_painleve4",
    "residual_riccati",
    "residual_sigma_form",
    "residual_sigma_recurrence",
    "residual_supplementary",
    "sci_str",
    "seed_R0",
    "seed_r1",
    "select_r_branch",
    "subleading_coeff",
    "upper_incomplete_gamma",
    "zeroth_moment",
    "__version__",
]

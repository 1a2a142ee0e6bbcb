"""Balanced truncation of linear systems with quadratic outputs, with
time-limited and frequency-limited variants, dense and low-rank Gramian
backends, and an experiment harness."""

from .model import (
    FrequencyBand,
    LtiQoSystem,
    ReducedSystem,
    TimeInterval,
    modal_space_structure,
    new_system,
    project,
    random_stable_system,
    spectral_abscissa,
)
from .linalg import (
    LdlFactor,
    SemidefFactor,
    cholesky,
    matrix_exponential,
    principal_log_ratio,
    semidef_factor,
    solve_lyapunov,
    svd,
)
from .gramians import (
    AuxiliaryGramians,
    GramianSet,
    aux_freq_gramian,
    aux_time_gramians,
    energy_bounds,
    gram_freq_limited,
    gram_infinite,
    gram_time_limited,
    quadrature_gramian_oracle,
)
from .lowrank import (
    AdiConfig,
    LaguerreConfig,
    LowRankGramian,
    adi_ldl,
    assemble_freq_rhs,
    assemble_time_rhs,
    dominant_shifts,
    laguerre_freq_factor,
    laguerre_gram_matrix,
    laguerre_time_factor,
)
from .reduction import (
    ProjectionPair,
    ReductionReport,
    eigenvalue_decay,
    reduce,
    square_root_reduce,
    suggest_order,
)
from .sim import (
    ErrorSeries,
    Signal,
    Trajectory,
    relative_error,
    run_comparison,
    simulate,
)

__version__ = "0.1.0"

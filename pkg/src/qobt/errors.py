"""Exception types shared across the package."""


class QobtError(Exception):
    """Base class for all qobt-specific errors."""


class DimensionError(QobtError, ValueError):
    """Matrix dimensions are mutually inconsistent; message names the field."""


class StabilityError(QobtError, ValueError):
    """An operation required a Hurwitz state matrix and did not get one."""


class LyapunovError(QobtError, RuntimeError):
    """The Sylvester operator behind a Lyapunov solve is (near) singular."""


class BranchCutError(QobtError, RuntimeError):
    """The matrix logarithm argument has an eigenvalue on the closed
    negative real axis."""


class RankError(QobtError, ValueError):
    """Requested reduced order exceeds the numerically usable rank."""


class SingularGramianError(QobtError, RuntimeError):
    """A Gramian that must be inverted is numerically singular."""


class GridMismatchError(QobtError, ValueError):
    """Two trajectories do not share the same time grid."""


class SimulationError(QobtError, RuntimeError):
    """The time integrator failed; message records the failure time."""


class OracleBudgetError(QobtError, RuntimeError):
    """The quadrature oracle exhausted its node budget before the
    integrand tail converged."""

"""Exception types shared across the package."""


class DdlqrError(Exception):
    """Base class for all package errors."""


class DimensionError(DdlqrError, ValueError):
    """Operand shapes are inconsistent with the operation."""


class UnstableError(DdlqrError):
    """A closed-loop matrix is not Schur stable (spectral radius >= 1)."""


class NoConvergenceError(DdlqrError):
    """An iterative solver hit its iteration cap before meeting tolerance."""


class NotSymmetricError(DdlqrError, ValueError):
    """A matrix required to be symmetric is not, beyond tolerance."""


class RankDeficientError(DdlqrError):
    """A data matrix does not have the rank required by the operation."""


class InfeasibleError(DdlqrError):
    """A parametrization violates its equality constraint beyond tolerance."""


class PhiSingularError(DdlqrError):
    """The data covariance is numerically singular; the update cannot proceed."""


class NotPDError(DdlqrError):
    """A matrix required to be positive definite is not."""

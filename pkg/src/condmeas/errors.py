"""Exception types shared across the package."""


class CondmeasError(Exception):
    """Base class for all condmeas errors."""


class ShapeError(CondmeasError, ValueError):
    """Input has the wrong shape, a dimension mismatch, or non-finite entries."""


class ZeroMatrixError(CondmeasError, ValueError):
    """Operation requires a nonzero matrix."""


class SingularMatrixError(CondmeasError):
    """Matrix is singular within the configured tolerance."""


class RankDeficientError(CondmeasError):
    """Matrix does not have full column rank."""


class NotSymmetricError(CondmeasError, ValueError):
    """Matrix is not symmetric within tolerance."""


class NotPSDError(CondmeasError, ValueError):
    """Matrix is not positive semidefinite within tolerance."""


class EnumerationCapError(CondmeasError):
    """An enumeration (supports, subsets, signatures) exceeds its cap."""


class NotStrictlyFeasibleError(CondmeasError):
    """The system Ax > 0 has no solution.

    Carries the certificate: a unit nonnegative vector v with ``||A^T v||``
    below the feasibility tolerance.
    """

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class InfeasibleError(CondmeasError):
    """A constrained least-squares problem has an empty feasible set."""


class MatrixParseError(CondmeasError, ValueError):
    """A matrix file could not be parsed; message carries file/line/column."""

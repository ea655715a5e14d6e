"""Exception types shared across the package."""


class NipsqwError(Exception):
    """Base class for every package-specific failure."""


class SingularMatrix(NipsqwError):
    """Matrix failed the relative determinant test required for inversion."""


class NoConvergence(NipsqwError):
    """Eigensolver exhausted its iteration budget or residual contract."""


class NotHermitian(NipsqwError):
    """An operation that requires a Hermitian input received one that is not."""


class NotPositiveDefinite(NipsqwError):
    """Hermitian input lacks the strictly positive spectrum the operation needs."""


class DegenerateBoundary(NipsqwError):
    """Boundary parameters make the corner entry blow up."""


class OutOfRange(NipsqwError):
    """A scalar argument violates its documented domain."""


class NotAnEigenvalue(NipsqwError):
    """Eigenvector reconstruction was asked for an energy off the spectrum."""


class NoSlope(NipsqwError):
    """The determinant does not depend on the boundary strength at this energy."""


class DefectiveAtEP(NipsqwError):
    """The matrix has no complete eigenbasis (exceptional-point input)."""


class BadWeights(NipsqwError):
    """Metric weight vector is not strictly positive with the right length."""


class SingularDyson(NipsqwError):
    """The assembled similarity map is numerically non-invertible."""


class EPProximity(NipsqwError):
    """A computation came within the guard radius of the exceptional point.

    When raised mid-evolution, ``trajectory`` holds the states completed
    before the guard tripped and ``t_fail`` the offending time.
    """

    def __init__(self, message, trajectory=None, t_fail=None):
        super().__init__(message)
        self.trajectory = list(trajectory) if trajectory is not None else []
        self.t_fail = t_fail


class NonRealNorm(NipsqwError):
    """A quadratic form that must be real came back with an imaginary part."""


class NotAnObservable(NipsqwError):
    """Candidate operator fails the metric compatibility test."""

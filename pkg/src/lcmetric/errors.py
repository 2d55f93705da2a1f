"""Exception types raised across the package."""


class InvalidInputError(ValueError):
    """Input data violates a structural precondition (shape, symmetry, finiteness, ...)."""


class SingularMetricError(InvalidInputError):
    """A bilinear form that must be nondegenerate is (numerically) degenerate."""


class TorsionError(InvalidInputError):
    """A left-invariant connection that must be torsion-free is not.

    The offending torsion tensor is attached as ``torsion`` (index order [k][i][j]).
    """

    def __init__(self, message, torsion):
        super().__init__(message)
        self.torsion = torsion


class CapacityError(RuntimeError):
    """Word enumeration for an obstruction space exceeded its budget."""


class NotSupportedError(InvalidInputError):
    """Requested construction lies outside what the library implements."""

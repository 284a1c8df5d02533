"""Exception hierarchy.

Validation failures map to CLI exit code 2, dimension mismatches to 3,
optimizer non-convergence to 5.
"""


class SkewCorrError(Exception):
    """Base class for all package errors."""


class ValidationError(SkewCorrError, ValueError):
    """An input violates a type invariant.

    ``invariant`` names the violated condition, ``deviation`` carries the
    offending magnitude when one exists.
    """

    invariant = "validation"

    def __init__(self, message, deviation=None):
        super().__init__(message)
        self.deviation = deviation


class NotHermitian(ValidationError):
    invariant = "hermitian"


class NotDensityMatrix(ValidationError):
    invariant = "density-matrix"


class NotTracePreserving(ValidationError):
    invariant = "completeness"


class NotUnitary(ValidationError):
    invariant = "unitary"


class NotOrthonormal(ValidationError):
    invariant = "orthonormal-basis"


class DimensionMismatch(SkewCorrError, ValueError):
    """Operands have incompatible shapes."""


class ImaginaryResidue(SkewCorrError, ArithmeticError):
    """A trace that must be real came back with a large imaginary part."""


class ConsistencyError(SkewCorrError, ArithmeticError):
    """Two independent evaluation routes disagree."""


class NegativeCorrelation(SkewCorrError, ArithmeticError):
    """A correlation quantity that is provably non-negative came out negative."""


class NonConvergence(SkewCorrError, RuntimeError):
    """No optimizer restart reached its convergence criterion."""

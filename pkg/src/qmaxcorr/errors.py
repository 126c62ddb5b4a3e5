"""Exception types raised by qmaxcorr."""


class MaxCorrError(ValueError):
    """Base class for all qmaxcorr errors."""


class DimensionMismatch(MaxCorrError):
    pass


class ShapeMismatch(MaxCorrError):
    pass


class NotHermitian(MaxCorrError):
    pass


class NotPSD(MaxCorrError):
    pass


class TraceNotOne(MaxCorrError):
    pass


class NotTracePreserving(MaxCorrError):
    pass


class NotNormalized(MaxCorrError):
    pass


class OutOfRange(MaxCorrError):
    pass


class ZeroMarginal(MaxCorrError):
    pass


class ZeroDiagonal(MaxCorrError):
    pass


class ConvergenceFailure(MaxCorrError, ArithmeticError):
    pass


class TopCoefficientDeviation(MaxCorrError):
    """The leading Schmidt coefficient of the tilde operator is not 1.

    This always indicates a support or index-convention problem, never a
    property of the input state.
    """


class WitnessConstructionFailed(MaxCorrError):
    pass


class DegenerateOptimizer(UserWarning):
    """Emitted when the optimal observables are not unique."""

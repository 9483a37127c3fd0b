"""Exception types shared across the package."""


class MixError(Exception):
    pass


class NonErgodicError(MixError):
    """Chain is reducible or periodic; carries a short diagnosis."""

    def __init__(self, diagnosis="not ergodic"):
        super().__init__(diagnosis)
        self.diagnosis = diagnosis


class NoConvergenceError(MixError):
    pass


class DimensionMismatchError(MixError, ValueError):
    pass


class InvalidMatrixError(MixError, ValueError):
    pass


class NotReversibleError(MixError):
    def __init__(self, residual):
        super().__init__(f"reversibility residual {residual:.3e}")
        self.residual = residual


class ZeroGapError(MixError):
    def __init__(self, summary=None):
        super().__init__("absolute spectral gap is numerically zero")
        self.summary = summary


class UnboundedError(MixError):
    """A threshold search hit its cap without success."""


class SkipTooLargeError(MixError, ValueError):
    pass


class InvalidBandError(MixError, ValueError):
    pass


class InvalidRangeError(MixError, ValueError):
    pass


class HypothesisViolatedError(MixError, ValueError):
    pass


class InvalidSequenceError(MixError, ValueError):
    pass


class InvalidLambdaError(MixError, ValueError):
    pass


class NotInTError(MixError, ValueError):
    pass


class NotInSError(MixError, ValueError):
    pass


class TruncationTooCoarseError(MixError):
    pass


class TailTooHeavyError(MixError):
    pass


class WrongNuShapeError(MixError, ValueError):
    pass


class SummabilityFailureError(MixError):
    pass


class NotAbsolutelyContinuousError(MixError, ValueError):
    pass


class DomainError(MixError, ValueError):
    pass


class ConfigError(MixError, ValueError):
    pass


class BoundViolationError(MixError):
    """An experiment observed a violation of a closed-form guarantee."""

    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


class BudgetExhaustedError(MixError):
    pass

"""Exception hierarchy shared by every module."""


class LoewnerBallError(Exception):
    """Base class for all library errors."""


class ValidationError(LoewnerBallError, ValueError):
    """Input rejected before any numerics ran (CLI exit status 1)."""


class DegreeMismatchError(ValidationError):
    pass


class InvalidCompositionError(ValidationError):
    pass


class OutOfRangeError(ValidationError, IndexError):
    pass


class NormalizationError(ValidationError):
    pass


class WeightError(ValidationError):
    pass


class ParameterError(ValidationError):
    pass


class NumericalError(LoewnerBallError, ArithmeticError):
    """A computation ran but did not produce a trustworthy answer (exit status 2)."""


class InstabilityError(NumericalError):
    pass


class ConvergenceError(NumericalError):
    def __init__(self, message, worst=None):
        super().__init__(message)
        self.worst = worst

"""Exception hierarchy."""


class ToricScoreError(Exception):
    """Base class for every error raised by the engine."""


class VariableMismatchError(ToricScoreError, ValueError):
    pass


class FanError(ToricScoreError, ValueError):
    """Malformed fan, or a fan failing smoothness / wall checks."""


class ClassGroupTorsionError(FanError):
    pass


class ArityError(ToricScoreError, ValueError):
    pass


class ClassMismatchError(ToricScoreError, ValueError):
    """A polynomial is not homogeneous of the divisor class it was declared with."""


class ClassCompatibilityError(ToricScoreError, ValueError):
    """A deformation coefficient couples rays of different divisor classes."""


class NotBlockCompleteError(ToricScoreError, ValueError):
    """A deformation mixes a primitive collection's class part with rays outside it."""


class DegenerateDeformationError(ToricScoreError, ValueError):
    """The deformed quotient ring has no usable one-dimensional top degree."""


class DivisibilityError(ToricScoreError, ArithmeticError):
    """E∘J is not a multiple of f: the monad data do not form a complex."""

    def __init__(self, message, coordinate=None, remainder=None):
        super().__init__(message)
        self.coordinate = coordinate
        self.remainder = remainder


class NonConstantQuotientError(ToricScoreError, ArithmeticError):
    pass


class ProblemParseError(ToricScoreError, ValueError):
    """Problem file error; ``location`` is a field path or ``line:col``."""

    def __init__(self, message, location=""):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location


class HypothesisError(ToricScoreError, ValueError):
    """A theorem hypothesis is violated and violations were not allowed."""

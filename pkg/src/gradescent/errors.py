"""Exception hierarchy.  Every refusal is explicit and typed; no operation
returns a silently wrong answer outside its decidable class."""


class GradescentError(Exception):
    """Base class for all library errors."""


class ContextMismatchError(GradescentError):
    """Operands built over different grading contexts."""


class GradingMismatchError(GradescentError):
    """Homogeneous arithmetic with incompatible gradings (e.g. adding
    elements of different degree)."""


class UndecidableHereError(GradescentError):
    """The input leaves the class on which this operation is exact."""


class UnsupportedLayerError(GradescentError):
    """A tower layer outside the supported construction classes."""


class FactorRangeError(GradescentError):
    """Base-field factorization outside the certified desk range."""


class ScenarioError(GradescentError):
    """Scenario file problem, with a diagnostic code and a path."""

    def __init__(self, code, path, message):
        super().__init__(f"{code} at {path}: {message}")
        self.code = code
        self.path = path
        self.message = message

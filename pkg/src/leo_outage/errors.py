"""Exception hierarchy.

Two families: ``ValidationError`` subclasses mean the caller asked for
something outside the model's domain; ``NumericalError`` subclasses mean a
numerical routine could not deliver the requested accuracy. The CLI maps
them to exit codes 1 and 2.
"""
from __future__ import annotations


class LeoError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(LeoError, ValueError):
    pass


class NumericalError(LeoError, ArithmeticError):
    pass


class DomainError(ValidationError):
    """Argument outside the mathematical domain of an operation."""


class BeamMissesEarth(DomainError):
    """The main-lobe edge ray does not intersect the Earth."""


class DegenerateConditioning(ValidationError):
    """A conditional distance law has zero conditioning mass."""


class InfeasibleVisibility(ValidationError):
    """The visibility floor cannot be met at any elevation angle >= 0."""


class InfeasibleRate(ValidationError):
    """The outage ceiling cannot be met for this rate at any feasible angle."""


class NoFeasiblePoint(ValidationError):
    """An exhaustive grid contains no point satisfying both constraints."""


class ConfigParseError(ValidationError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class ConfigValidationError(ValidationError):
    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"{key}: {message}")


class ConvergenceNotReached(NumericalError):
    """Series truncation cap hit before the tolerance was met."""


class QuadratureFailure(NumericalError):
    pass


class CancellationOverflow(NumericalError):
    """The closed-form binomial sum would lose more precision than allowed."""


class IterationCapReached(NumericalError):
    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best

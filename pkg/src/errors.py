"""
Exception hierarchy for the interior point solver.

Every error carries the CLI exit code of its family and, once it has passed
through the driver, the name of the solve phase it was raised in.
"""
from typing import Optional


class IpmError(Exception):
    """Base class for all solver errors."""

    exit_code = 3

    def __init__(self, message: str, phase: Optional[str] = None):
        super().__init__(message)
        self.message = message
        self.phase = phase

    def __str__(self) -> str:
        if self.phase:
            return f"[{self.phase}] {self.message}"
        return self.message


# Validation family (exit code 2)

class ValidationError(IpmError):
    exit_code = 2


class ParseError(ValidationError):
    """Instance or configuration file could not be parsed."""

    def __init__(self, message: str, line: Optional[int] = None, field: Optional[str] = None):
        context = []
        if line is not None:
            context.append(f"line {line}")
        if field is not None:
            context.append(f"field '{field}'")
        if context:
            message = f"{', '.join(context)}: {message}"
        super().__init__(message)
        self.line = line
        self.field = field


class RankDeficient(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class PreconditionViolation(ValidationError):
    pass


class InfeasibleInput(ValidationError):
    pass


class MissingParameters(ValidationError):
    pass


# Numerical family (exit code 3)

class NumericalError(IpmError):
    exit_code = 3


class NotPositiveDefinite(NumericalError):
    pass


class SingularUpdate(NumericalError):
    pass


class NoConvergence(NumericalError):
    pass


class InvariantViolation(NumericalError):
    pass


class OracleContractViolation(NumericalError):
    pass


class PotentialOverflow(NumericalError):
    pass


class ExtractionFailure(NumericalError):
    pass


class FeasibilityViolation(NumericalError):
    pass


# Rounding family (exit code 4)

class RoundingFailure(IpmError):
    exit_code = 4

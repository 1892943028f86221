"""
DESCRIPTION

    Exceptions raised by the iontrans packages. Every public precondition failure raises a subclass of
    IonTransError so that the harness can record it per sweep point and carry on.
"""

from typing import Optional


class IonTransError(Exception):
    pass


class SolverFailureError(IonTransError):
    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual={residual:.3e})")
        self.residual = residual


class GeometryError(IonTransError):
    pass


class BasisBudgetError(IonTransError):
    def __init__(self, dimension: int, budget: int):
        super().__init__(f"sector basis dimension {dimension} exceeds the budget of {budget} states")
        self.dimension = dimension
        self.budget = budget


class InvalidSectorError(IonTransError):
    pass


class OperatorSpecError(IonTransError):
    pass


class DimensionMismatchError(IonTransError):
    pass


class StiffnessError(IonTransError):
    def __init__(self, message: str, time: float):
        super().__init__(f"{message} at t={time:.6g}")
        self.time = time


class NegativeRateError(IonTransError):
    pass


class PulseDomainError(IonTransError):
    pass


class CalibrationError(IonTransError):
    pass


class DurationError(IonTransError):
    pass


class NormalizationError(IonTransError):
    pass


class ConfigError(IonTransError):
    def __init__(self, message: str, field: Optional[str] = None, line: Optional[int] = None):
        location = []
        if field is not None:
            location.append(f"field '{field}'")
        if line is not None:
            location.append(f"line {line}")
        prefix = f"[{', '.join(location)}] " if location else ""
        super().__init__(prefix + message)
        self.field = field
        self.line = line


class StepError(IonTransError):
    """Wraps a failure of one transfer step so the joint runner can report which step broke."""

    def __init__(self, step: str, cause: Exception):
        super().__init__(f"step {step}: {cause}")
        self.step = step
        self.cause = cause

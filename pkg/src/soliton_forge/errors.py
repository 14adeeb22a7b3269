"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class SolitonForgeError(Exception):
    """Base class for every error raised by this package."""


class SpecError(SolitonForgeError, ValueError):
    """Invalid bundle configuration.

    ``violations`` holds every problem found, not just the first one.
    """

    def __init__(self, message: str, violations: list | None = None):
        super().__init__(message)
        self.violations = list(violations or [])


class EigenvalueRangeViolation(SpecError):
    pass


class ClassMismatch(SpecError):
    pass


class DimensionMismatch(SpecError):
    pass


class NumericalError(SolitonForgeError, ArithmeticError):
    """Any failure of a numerical procedure (maps to CLI exit code 3)."""


class DegenerateExponent(NumericalError, ValueError):
    pass


class InvalidUmin(SolitonForgeError, ValueError):
    pass


class BelowUmin(SolitonForgeError, ValueError):
    pass


class AtOrBelowUmin(BelowUmin):
    pass


class RangeOverflow(NumericalError, OverflowError):
    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class NoSignChange(NumericalError):
    pass


class OrderingViolation(NumericalError):
    pass


class ClassificationConflict(NumericalError):
    pass


class UndeterminedGrowth(NumericalError):
    pass


class QuadratureFailure(NumericalError):
    pass


class StepFailure(NumericalError):
    pass


class GridTooClose(SolitonForgeError, ValueError):
    pass


class PositivityViolation(NumericalError):
    pass

"""Exception hierarchy shared by all futureq modules.

Two families matter for the CLI exit codes: scenario/input problems
(exit code 2) and numerical failures detected at runtime (exit code 3).
"""


class FutureqError(Exception):
    """Base class for all errors raised by this package."""


class NumericalError(FutureqError):
    """Base class for runtime numerical failures (CLI exit code 3)."""


class DimMismatch(NumericalError):
    """Operands have incompatible shapes."""


class Defective(NumericalError):
    """Matrix is numerically non-diagonalizable (bad reconstruction
    residual or eigenvector condition number above the ceiling)."""


class PropagatorOverflow(NumericalError):
    """A propagator entry magnitude exceeds the configured ceiling."""


class IllConditioned(NumericalError):
    """Metric construction failed its positive-definiteness or
    inverse-consistency certificate."""


class ZeroNorm(NumericalError):
    """State vector has (numerically) zero norm."""


class NearOrthogonal(NumericalError):
    """Quotient denominator below the configured floor; the weak value
    is numerically unstable there."""


class NoConvergence(NumericalError):
    """Iteration budget exhausted before the stopping tolerance was met."""


class Blowup(NumericalError):
    """Classical trajectory escaped the configured phase-space bound."""


class InsufficientData(NumericalError):
    """Too few usable samples for a fit."""


class NoImprovement(NumericalError):
    """Every optimizer restart saw a flat objective (no evaluation
    differed from any other)."""


class ScenarioParseError(FutureqError):
    """Scenario document is not well-formed (CLI exit code 2)."""


class ScenarioValidationError(FutureqError):
    """Scenario document is well-formed but violates an invariant
    (CLI exit code 2)."""

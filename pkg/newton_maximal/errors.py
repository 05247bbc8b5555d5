"""Exception types raised by newton_maximal.

Verification routines do not raise for failed checks; they record
violations in a :class:`newton_maximal.report.VerificationReport`.
The exceptions below signal invalid input or a broken construction.
"""

from __future__ import annotations


class NewtonMaximalError(Exception):
    """Base class for all package errors."""


class PolynomialSyntaxError(NewtonMaximalError, ValueError):
    """Polynomial text does not match the grammar."""

    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} (at position {position})")
        self.position = position


class DiagramError(NewtonMaximalError, RuntimeError):
    """Newton diagram construction or query failed."""


class GridError(NewtonMaximalError, ValueError):
    """A grid function or grid layout is invalid."""


class ResolutionError(NewtonMaximalError, ValueError):
    """A shift is below the resolution of a histogram."""


class QuadratureError(NewtonMaximalError, RuntimeError):
    """Oscillatory quadrature did not converge under node doubling."""

    def __init__(self, message: str, xi: float) -> None:
        super().__init__(f"{message} (xi={xi!r})")
        self.xi = xi


class ConfigError(NewtonMaximalError, ValueError):
    """Experiment configuration is invalid."""

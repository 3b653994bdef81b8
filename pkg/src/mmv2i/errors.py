"""
Exception hierarchy for mmv2i.

Every error raised on purpose by the package derives from ``Mmv2iError`` and
from the closest builtin, so callers may catch either.
"""
from __future__ import annotations

from typing import Optional, Sequence


class Mmv2iError(Exception):
    """Base class for all package errors."""


class DomainError(Mmv2iError, ValueError):
    """An argument lies outside the domain of a model primitive."""


class ConfigError(Mmv2iError, ValueError):
    """A configuration value violates a constraint, or a config file is malformed."""

    def __init__(self, field: str, constraint: str, line: Optional[int] = None):
        self.field = field
        self.constraint = constraint
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"{field}: {constraint}{where}")


class QuadratureError(Mmv2iError, ArithmeticError):
    """Adaptive quadrature failed to reach the requested tolerance."""

    def __init__(self, message: str, value: float = float("nan"),
                 error: float = float("nan"), tolerance: float = float("nan")):
        self.value = value
        self.error = error
        self.tolerance = tolerance
        super().__init__(message)


class IntegrandNaNError(QuadratureError):
    """The integrand returned NaN."""

    def __init__(self, abscissa: float):
        self.abscissa = abscissa
        super().__init__(f"integrand returned NaN at x = {abscissa!r}")


class DivergenceError(QuadratureError):
    """A semi-infinite integral did not stabilize as the range grew."""


class RootNotBracketedError(Mmv2iError, ArithmeticError):
    """No sign change was found while expanding the bracket (root beyond horizon)."""


class GridMismatchError(Mmv2iError, ValueError):
    """Reference abscissae are missing from a result table."""

    def __init__(self, missing: Sequence[float], label: str = ""):
        self.missing = tuple(missing)
        shown = ", ".join(f"{x:.12g}" for x in self.missing[:5])
        more = f" and {len(self.missing) - 5} more" if len(self.missing) > 5 else ""
        prefix = f"{label}: " if label else ""
        super().__init__(f"{prefix}no result row within 1e-9 of axis value(s) {shown}{more}")


class ResultsIOError(Mmv2iError, OSError):
    """Reading or writing a result file failed."""

"""
Quadrature and root-finding primitives for the analytic evaluators.

Adaptive integration is delegated to QUADPACK through ``scipy.integrate.quad``;
this module adds tolerance bookkeeping, NaN detection, tail truncation for
semi-infinite ranges and bracket expansion for monotone root problems.

Integrand callbacks must be side-effect free. Nothing here holds state, so
all functions are reentrant.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import Callable, NamedTuple, Optional, Tuple

from scipy import integrate, optimize

from .errors import (
    ConfigError,
    DivergenceError,
    DomainError,
    IntegrandNaNError,
    QuadratureError,
    RootNotBracketedError,
)

logger = logging.getLogger(__name__)

Integrand = Callable[[float], float]


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances for adaptive quadrature.

    ``initial_panel`` and ``max_panels`` only affect panel doubling in
    :func:`integrate_semi_infinite`.
    """

    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    max_subdivisions: int = 2000
    tail_cutoff_probability: float = 1e-10
    initial_panel: float = 1.0
    max_panels: int = 96

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol", "tail_cutoff_probability", "initial_panel"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ConfigError(f"quadrature.{name}", "must be a finite positive number")
        if self.max_subdivisions < 1:
            raise ConfigError("quadrature.max_subdivisions", "must be >= 1")
        if self.max_panels < 1:
            raise ConfigError("quadrature.max_panels", "must be >= 1")

    def tolerance(self, value: float) -> float:
        """Acceptable absolute error for an estimate of magnitude ``value``."""
        return max(self.rel_tol * abs(value), self.abs_tol)

    def tightened(self, factor: float) -> "QuadratureSpec":
        """Copy with both tolerances divided by ``factor`` (for inner integrals)."""
        return replace(self, rel_tol=self.rel_tol / factor, abs_tol=self.abs_tol / factor)


DEFAULT_QUADRATURE = QuadratureSpec()


class QuadResult(NamedTuple):
    value: float
    error: float


def _nan_guard(f: Integrand) -> Integrand:
    def guarded(x: float) -> float:
        y = f(x)
        if y != y:
            raise IntegrandNaNError(x)
        return y
    return guarded


def _quad(f: Integrand, a: float, b: float, spec: QuadratureSpec) -> QuadResult:
    out = integrate.quad(
        _nan_guard(f), a, b,
        epsabs=spec.abs_tol, epsrel=spec.rel_tol,
        limit=spec.max_subdivisions, full_output=1,
    )
    value, error = float(out[0]), float(out[1])
    message = out[3] if len(out) > 3 else None
    if message is not None and "divergent" in str(message):
        raise DivergenceError(
            f"integral over [{a}, {b}] appears divergent: {message}",
            value=value, error=error, tolerance=spec.tolerance(value),
        )
    if not math.isfinite(value):
        raise DivergenceError(f"integral over [{a}, {b}] is not finite", value=value, error=error)
    tolerance = spec.tolerance(value)
    if message is not None:
        if error > tolerance:
            raise QuadratureError(
                f"quadrature over [{a}, {b}] did not converge "
                f"(error {error:.3g} > tolerance {tolerance:.3g}): {message}",
                value=value, error=error, tolerance=tolerance,
            )
        logger.debug("quad over [%g, %g] flagged %r but error %.3g is within tolerance",
                     a, b, message, error)
    return QuadResult(value, error)


def integrate_finite(f: Integrand, a: float, b: float,
                     spec: QuadratureSpec = DEFAULT_QUADRATURE) -> QuadResult:
    """Integrate ``f`` over ``[a, b]``.

    Raises:
        DomainError: if ``a > b``.
        IntegrandNaNError: if ``f`` returns NaN.
        QuadratureError: if the error estimate exceeds
            ``max(rel_tol * |I|, abs_tol)`` after ``max_subdivisions``.
    """
    if a > b:
        raise DomainError(f"integration bounds reversed: a={a} > b={b}")
    if a == b:
        return QuadResult(0.0, 0.0)
    return _quad(f, a, b, spec)


def integrate_semi_infinite(f: Integrand, a: float,
                            spec: QuadratureSpec = DEFAULT_QUADRATURE,
                            tail_bound: Optional[Callable[[float], float]] = None) -> QuadResult:
    """Integrate ``f`` over ``[a, inf)``.

    Without ``tail_bound`` the range is mapped onto (0, 1] by QUADPACK's
    infinite-interval transform. With ``tail_bound(X)``, an upper bound on
    ``int_X^inf |f|``, the range is covered by panels of doubling width until
    the bound falls below ``tail_cutoff_probability`` times the running
    estimate; the bound is added to the reported error.

    Raises:
        DivergenceError: if the estimate does not stabilize.
    """
    if tail_bound is None:
        return _quad(f, a, math.inf, spec)

    total = 0.0
    error = 0.0
    lo = a
    width = spec.initial_panel
    for panel in range(spec.max_panels):
        hi = lo + width
        part = integrate_finite(f, lo, hi, spec)
        total += part.value
        error += part.error
        remaining = tail_bound(hi)
        if remaining <= spec.tail_cutoff_probability * max(abs(total), spec.abs_tol):
            logger.debug("semi-infinite integral from %g truncated at %g after %d panels",
                         a, hi, panel + 1)
            return QuadResult(total, error + remaining)
        lo = hi
        width *= 2.0
    raise DivergenceError(
        f"integral from {a} not stabilized after {spec.max_panels} panels "
        f"(remaining mass bound {remaining:.3g} at x = {lo:.6g})",
        value=total, error=error + remaining,
    )


def _expand_bracket(g: Integrand, lo: float, hi_hint: float,
                    max_expansions: int) -> Tuple[float, float]:
    """Return ``(a, b)`` with ``g(a) < 0 <= g(b)``, doubling the span from ``lo``."""
    hi = hi_hint if hi_hint > lo else lo + max(1.0, abs(lo))
    a = lo
    for _ in range(max_expansions + 1):
        g_hi = g(hi)
        if g_hi != g_hi:
            raise DomainError(f"bracketing function returned NaN at {hi}")
        if g_hi >= 0:
            return a, hi
        a = hi
        hi = lo + 2.0 * (hi - lo)
    raise RootNotBracketedError(
        f"no sign change on [{lo}, {hi}] after {max_expansions} expansions: root beyond horizon"
    )


def find_root_decreasing(g: Integrand, lo: float, hi_hint: float,
                         max_expansions: int = 64) -> float:
    """Zero of ``g(r) = r - RHS(r)`` where RHS is decreasing in ``r``.

    ``g`` must increase through zero on ``[lo, inf)``. Returns ``lo`` when
    ``g(lo) >= 0``. The bracket starts at ``[lo, hi_hint]`` and its span is
    doubled until the sign changes; Brent's method then narrows it to
    ``1e-10 * max(1, r*)``.
    """
    if g(lo) >= 0:
        return lo
    a, b = _expand_bracket(g, lo, hi_hint, max_expansions)
    logger.debug("root bracket [%.6g, %.6g]", a, b)
    if g(b) == 0:
        return b
    return float(optimize.brentq(g, a, b, xtol=5e-11, rtol=5e-11, maxiter=500))


def invert_increasing(h: Integrand, y: float, lo: float, hi_hint: float,
                      max_expansions: int = 64) -> float:
    """Solve ``h(r) = y`` for increasing ``h`` on ``[lo, inf)`` by bisection.

    Returns ``lo`` when ``h(lo) >= y``.
    """
    g = lambda r: h(r) - y  # noqa: E731
    if g(lo) >= 0:
        return lo
    a, b = _expand_bracket(g, lo, hi_hint, max_expansions)
    if g(b) == 0:
        return b
    return float(optimize.bisect(g, a, b, xtol=5e-11, rtol=5e-11, maxiter=500))

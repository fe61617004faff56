"""
Numerical kernels.

Adaptive quadrature, improper integrals with divergence detection, bracketed
root finding and central finite differences. Every routine is a pure function
of its inputs.
"""

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Literal, Union

import numpy as np
from scipy import integrate as sp_integrate
from scipy import optimize as sp_optimize

from ..config import get_settings
from ..exceptions import NonFiniteError, NoSignChangeError, SubdivisionLimitError
from ..logging_config import get_logger

logger = get_logger(__name__)

ScalarFunction = Callable[[float], float]

# Doubling windows reach ~1e19 * window after this many steps.
MAX_WINDOWS = 64
DIVERGENCE_PATIENCE = 4
DIVERGENCE_RATIO = 0.99


@dataclass(frozen=True)
class Tolerance:
    """Error targets for the numerical kernels."""

    abs_tol: float = 1e-10
    rel_tol: float = 1e-9
    max_subdivisions: int = 2048

    def __post_init__(self) -> None:
        if not self.abs_tol > 0:
            raise ValueError(f"abs_tol must be positive, got {self.abs_tol}")
        if not self.rel_tol > 0:
            raise ValueError(f"rel_tol must be positive, got {self.rel_tol}")
        if self.max_subdivisions < 1:
            raise ValueError(
                f"max_subdivisions must be >= 1, got {self.max_subdivisions}"
            )

    @classmethod
    def from_settings(cls) -> "Tolerance":
        settings = get_settings()
        return cls(settings.abs_tol, settings.rel_tol, settings.max_subdivisions)


DEFAULT_TOLERANCE = Tolerance()


@dataclass(frozen=True)
class Converged:
    value: float
    est_error: float


@dataclass(frozen=True)
class Divergent:
    direction: float  # +inf or -inf


@dataclass(frozen=True)
class Inconclusive:
    partial: float
    last_increment: float
    truncation_point: float


ImproperResult = Union[Converged, Divergent, Inconclusive]


def _checked(f: ScalarFunction) -> ScalarFunction:
    def wrapper(x: float) -> float:
        y = f(x)
        if not math.isfinite(y):
            raise NonFiniteError(x, y)
        return float(y)

    return wrapper


def integrate(
    f: ScalarFunction, a: float, b: float, tol: Tolerance = DEFAULT_TOLERANCE
) -> float:
    """
    Integrate f over [a, b] with adaptive Gauss-Kronrod bisection.

    QUADPACK never samples the endpoints, so integrands that only have a
    limit at ``b`` are fine.

    Args:
        f: Scalar integrand
        a: Lower limit
        b: Upper limit, ``b >= a``
        tol: Error targets and subdivision budget

    Returns:
        The integral estimate

    Raises:
        NonFiniteError: f returned inf/nan at a sample point
        SubdivisionLimitError: the subdivision budget was exhausted
    """
    if b < a:
        raise ValueError(f"integration limits reversed: a={a!r} > b={b!r}")
    if a == b:
        return 0.0

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sp_integrate.IntegrationWarning)
        result = sp_integrate.quad(
            _checked(f),
            a,
            b,
            epsabs=tol.abs_tol,
            epsrel=tol.rel_tol,
            limit=tol.max_subdivisions,
            full_output=1,
        )
    value, est_error, info = result[0], result[1], result[2]
    if len(result) > 3:
        if info["last"] >= tol.max_subdivisions:
            raise SubdivisionLimitError(value, est_error, tol.max_subdivisions)
        # Roundoff-limited: the estimate is still the best available.
        logger.debug("quad on [%r, %r]: %s", a, b, str(result[3]).splitlines()[0])
    return float(value)


def integrate_to_infinity(
    f: ScalarFunction,
    a: float,
    tol: Tolerance = DEFAULT_TOLERANCE,
    window: float = 1.0,
    blowup: float = 1e10,
    max_windows: int = MAX_WINDOWS,
) -> ImproperResult:
    """
    Integrate f over [a, inf) window by window.

    Window lengths double (window, 2*window, 4*window, ...). Two successive
    increments below abs_tol give Converged. Divergent is declared when the
    partial sum passes +/-blowup with non-shrinking increments, or when
    increments of one sign stop shrinking for DIVERGENCE_PATIENCE windows.
    """
    if not math.isfinite(a):
        raise ValueError(f"lower limit must be finite, got {a!r}")
    if window <= 0:
        raise ValueError(f"window must be positive, got {window!r}")

    partial = 0.0
    increments: list[float] = []
    left = a
    length = window
    for _ in range(max_windows):
        right = left + length
        step = integrate(f, left, right, tol)
        partial += step
        increments.append(step)
        left, length = right, 2.0 * length

        if len(increments) >= 2 and all(
            abs(s) < tol.abs_tol for s in increments[-2:]
        ):
            return Converged(partial, abs(increments[-1]) + abs(increments[-2]))

        if len(increments) >= 2 and abs(partial) > blowup:
            if abs(increments[-1]) >= abs(increments[-2]):
                return Divergent(math.copysign(math.inf, partial))

        if _stalled(increments, tol.abs_tol):
            return Divergent(math.copysign(math.inf, increments[-1]))

    return Inconclusive(partial, increments[-1], left)


def _stalled(increments: list[float], abs_tol: float) -> bool:
    if len(increments) < DIVERGENCE_PATIENCE + 1:
        return False
    tail = increments[-(DIVERGENCE_PATIENCE + 1) :]
    sign = math.copysign(1.0, tail[-1])
    if any(abs(s) < abs_tol or math.copysign(1.0, s) != sign for s in tail):
        return False
    return all(
        abs(curr) >= DIVERGENCE_RATIO * abs(prev)
        for prev, curr in zip(tail[:-1], tail[1:])
    )


def find_root(
    f: ScalarFunction, lo: float, hi: float, tol: Tolerance = DEFAULT_TOLERANCE
) -> float:
    """
    Bracketed root of f on [lo, hi] (Brent: bisection with secant steps).

    Raises:
        NoSignChangeError: f(lo) and f(hi) share a sign
        NonFiniteError: f is not finite at an evaluation point
    """
    g = _checked(f)
    f_lo, f_hi = g(lo), g(hi)
    if f_lo == 0.0:
        return float(lo)
    if f_hi == 0.0:
        return float(hi)
    if f_lo * f_hi > 0:
        raise NoSignChangeError(
            f"no sign change on [{lo!r}, {hi!r}]: f={f_lo!r}, {f_hi!r}"
        )
    root = sp_optimize.brentq(
        g, lo, hi, xtol=tol.abs_tol, rtol=4 * np.finfo(float).eps, maxiter=500
    )
    return float(root)


def finite_diff(f: ScalarFunction, x: float, h: float, order: Literal[1, 2]) -> float:
    """Central difference of order 1 or 2 with step h."""
    if h <= 0:
        raise ValueError(f"step must be positive, got {h!r}")
    if order == 1:
        return (f(x + h) - f(x - h)) / (2.0 * h)
    if order == 2:
        return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
    raise ValueError(f"order must be 1 or 2, got {order!r}")


def geometric_grid(lo: float, hi: float, count: int) -> np.ndarray:
    """``count`` points from lo to hi, evenly spaced in log."""
    return np.geomspace(lo, hi, count)

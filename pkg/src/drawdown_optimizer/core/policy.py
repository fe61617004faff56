"""
Optimal strategy, minimum probability of drawdown and HJB diagnostics.
"""

import math
from typing import Callable, Literal, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, Field

from ..exceptions import DegenerateSecondDerivativeError, DomainError
from ..logging_config import get_logger
from .model import DrawdownProblem, InfiniteSafeCertainDrawdown
from .payouts import ArrayLike
from .scale import ScaleContext

logger = get_logger(__name__)

Branch = Literal["RuinBranch", "DrawdownBranch", "Boundary", "CertainDrawdown"]

# Central-difference stencils are degenerate below this multiple of eps.
DEGENERACY_FACTOR = 64.0


class PolicyEval(BaseModel):
    pi_star: float
    drift_b: float
    vol_s: float


class PhiValue(BaseModel):
    value: float = Field(ge=0, le=1)
    branch: Branch


def pi_star(problem: DrawdownProblem, w: ArrayLike) -> ArrayLike:
    """
    Optimal amount in the risky asset, 2(c(w) - rw)/(mu - r).

    It does not depend on the running maximum or on alpha.
    """
    arr = np.asarray(w, dtype=float)
    if np.any(arr <= 0) or np.any(arr > problem.ws):
        raise DomainError(f"0 < w <= w_s required (w={w!r}, w_s={problem.ws!r})")
    return 2.0 * problem.excess(w) / (problem.market.mu - problem.market.r)


def pi_star_extended(problem: DrawdownProblem, w: ArrayLike, m: ArrayLike) -> ArrayLike:
    """
    The optimal strategy extended to all wealth levels.

    Half the optimal amount below alpha*m, the optimal amount on
    [alpha*m, w_s] and nothing above w_s.
    """
    arr = np.asarray(w, dtype=float)
    floor = problem.alpha * np.asarray(m, dtype=float)
    base = np.asarray(problem.excess(arr), dtype=float) / (
        problem.market.mu - problem.market.r
    )
    out = np.where(arr < floor, base, np.where(arr <= problem.ws, 2.0 * base, 0.0))
    return float(out) if out.ndim == 0 else out


def evaluate_policy(problem: DrawdownProblem, w: float, m: float) -> PolicyEval:
    """Amount invested and the drift/volatility of the controlled wealth."""
    amount = float(pi_star_extended(problem, w, m))
    market = problem.market
    drift = market.r * w + (market.mu - market.r) * amount - float(problem.rate(w))
    return PolicyEval(pi_star=amount, drift_b=drift, vol_s=market.sigma * amount)


def _phi_formula(ctx: ScaleContext, w: float, m: float) -> float:
    """
    Closed-form expression for phi without domain checks.

    Used where finite differences step slightly outside the domain.
    """
    ws = ctx.ws
    if m >= ws:
        return 1.0 - ctx.g(w, m) / ctx.g(ws, m)
    if math.isfinite(ws):
        return 1.0 - ctx.k(m) * ctx.g(w, m) / ctx.g(ws, ws)
    return 1.0 - ctx.k(m) * ctx.g(w, m) / ctx.g(m, m)


def phi(ctx: ScaleContext, w: float, m: float, allow_outside: bool = False) -> PhiValue:
    """
    Minimum probability of drawdown at wealth w with running maximum m.

    Args:
        ctx: Scale context of the problem
        w: Wealth
        m: Running maximum
        allow_outside: Map w < alpha*m to 1 and w > w_s (with m >= w_s) to 0
            instead of raising

    Returns:
        The probability and the branch of the solution that produced it

    Raises:
        DomainError: (w, m) is outside the domain
        IndeterminateLimitError: k(m) cannot be determined
    """
    problem = ctx.problem
    slack = ctx.tol.abs_tol
    ws = ctx.ws
    if allow_outside and m > 0 and math.isfinite(w):
        if w < problem.alpha * m:
            return PhiValue(value=1.0, branch="Boundary")
        if w > ws and m >= ws:
            return PhiValue(value=0.0, branch="Boundary")
    problem.check_point(w, m, tol=slack)

    if isinstance(problem.regime, InfiniteSafeCertainDrawdown):
        return PhiValue(value=1.0, branch="CertainDrawdown")
    if abs(w - problem.alpha * m) <= slack:
        return PhiValue(value=1.0, branch="Boundary")
    if m >= ws and abs(w - ws) <= slack:
        return PhiValue(value=0.0, branch="Boundary")

    value = min(1.0, max(0.0, _phi_formula(ctx, w, m)))
    branch: Branch = "RuinBranch" if m >= ws else "DrawdownBranch"
    return PhiValue(value=value, branch=branch)


def default_step(ctx: ScaleContext, m: float) -> float:
    """Finite-difference step: max(1e-5, 1e-4 * domain width)."""
    top = min(m, ctx.ws)
    return max(1e-5, 1e-4 * (top - ctx.alpha * m))


def hjb_residual(
    ctx: ScaleContext,
    w: float,
    m: float,
    h_grid_step: float,
    candidate: Optional[Callable[[float], float]] = None,
) -> float:
    """
    (rw - c(w)) phi_w - delta phi_w^2 / phi_ww by central differences.

    Args:
        ctx: Scale context of the problem
        w: Interior wealth
        m: Running maximum
        h_grid_step: Difference step
        candidate: Function of w to test instead of phi(., m)

    Raises:
        DegenerateSecondDerivativeError: phi_ww is zero at machine scale
    """
    if candidate is None:

        def candidate(x: float) -> float:
            return phi(ctx, x, m).value

    h = h_grid_step
    # evaluate left to right so cached integrals chain
    f_minus = candidate(w - h)
    f_zero = candidate(w)
    f_plus = candidate(w + h)
    first = (f_plus - f_minus) / (2.0 * h)
    second_diff = f_plus - 2.0 * f_zero + f_minus
    scale = abs(f_plus) + 2.0 * abs(f_zero) + abs(f_minus)
    if abs(second_diff) <= DEGENERACY_FACTOR * np.finfo(float).eps * scale:
        raise DegenerateSecondDerivativeError(
            f"second difference {second_diff!r} is at roundoff level at w={w!r}"
        )
    second = second_diff / (h * h)
    return -ctx.excess(w) * first - ctx.delta * first * first / second


class ConditionCheck(BaseModel):
    name: str
    passed: bool
    worst: float = 0.0
    at: Optional[float] = None


class VerificationReport(BaseModel):
    m: float
    checks: list[ConditionCheck]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]


def verification_conditions(
    ctx: ScaleContext,
    m: float,
    grid: Union[int, Sequence[float]] = 41,
    tol: float = 1e-8,
    pasting_tol: float = 1e-4,
    phi_fn: Optional[Callable[[float], float]] = None,
) -> VerificationReport:
    """
    Check monotonicity, convexity, range and smooth pasting of phi(., m).

    Args:
        ctx: Scale context of the problem
        m: Running maximum, below w_s
        grid: Number of equally spaced w values on [alpha*m, m], or the values
        tol: Slack for the sign conditions on first and second differences
        pasting_tol: Bound on |d phi/dm| at w = m
        phi_fn: Values to check instead of phi(., m)

    Returns:
        One entry per condition; failures are data, not exceptions
    """
    if not m < ctx.ws:
        raise DomainError(f"m < w_s required (m={m!r}, w_s={ctx.ws!r})")
    floor = ctx.alpha * m
    if isinstance(grid, int):
        ws_grid = np.linspace(floor, m, grid)
    else:
        ws_grid = np.asarray(sorted(grid), dtype=float)
    if phi_fn is None:

        def phi_fn(x: float) -> float:
            return phi(ctx, x, m).value

    values = np.array([phi_fn(float(x)) for x in ws_grid])
    checks = []

    first = np.diff(values)
    i = int(np.argmax(first))
    checks.append(
        ConditionCheck(
            name="non_increasing",
            passed=bool(first[i] <= tol),
            worst=float(first[i]),
            at=float(ws_grid[i + 1]),
        )
    )

    second = values[2:] - 2.0 * values[1:-1] + values[:-2]
    j = int(np.argmin(second)) if second.size else 0
    checks.append(
        ConditionCheck(
            name="convex",
            passed=bool(second.size == 0 or second[j] >= -tol),
            worst=float(second[j]) if second.size else 0.0,
            at=float(ws_grid[j + 1]) if second.size else None,
        )
    )

    out_of_range = float(max(np.max(values - 1.0), np.max(-values), 0.0))
    checks.append(
        ConditionCheck(name="in_unit_interval", passed=out_of_range == 0.0, worst=out_of_range)
    )

    at_floor = phi(ctx, floor, m).value
    checks.append(
        ConditionCheck(
            name="drawdown_boundary", passed=at_floor == 1.0, worst=1.0 - at_floor, at=floor
        )
    )

    slope = smooth_pasting(ctx, m)
    checks.append(
        ConditionCheck(name="smooth_pasting", passed=abs(slope) <= pasting_tol, worst=slope, at=m)
    )

    report = VerificationReport(m=m, checks=checks)
    if not report.passed:
        logger.info("verification at m=%r failed: %s", m, ", ".join(report.failures()))
    return report


def smooth_pasting(ctx: ScaleContext, m: float, h: Optional[float] = None) -> float:
    """d phi/dm at w = m by a central difference in m."""
    if h is None:
        h = 1e-5 * (ctx.ws - ctx.alpha * m) if math.isfinite(ctx.ws) else 1e-5 * m
    if isinstance(ctx.problem.regime, InfiniteSafeCertainDrawdown):
        return 0.0
    lower = _phi_formula(ctx, m, m - h)
    upper = _phi_formula(ctx, m, m + h)
    return (upper - lower) / (2.0 * h)


class PointEvaluation(BaseModel):
    phi: float
    branch: Branch
    pi_star: float
    g: Optional[float] = Field(default=None, description="None outside the domain")
    k_of_m: float
    w_s: float
    regime: str


def evaluate_point(
    ctx: ScaleContext, w: float, m: float, allow_outside: bool = False
) -> PointEvaluation:
    """phi with its branch, the optimal amount, g and k at one (w, m)."""
    problem = ctx.problem
    value = phi(ctx, w, m, allow_outside=allow_outside)
    inside = problem.in_domain(w, m)
    ws = ctx.ws
    amount = pi_star(problem, w) if inside else pi_star_extended(problem, w, m)
    return PointEvaluation(
        phi=value.value,
        branch=value.branch,
        pi_star=float(amount),
        g=ctx.g(w, m) if inside else None,
        k_of_m=1.0 if m >= ws else ctx.k(m),
        w_s=ws,
        regime=problem.regime.kind,
    )

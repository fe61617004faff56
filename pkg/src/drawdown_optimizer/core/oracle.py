"""
Independent reference values for the scale functions.

Closed forms for the constant payout and for c(w) = rw + b(ws - w)^2, and a
fixed-step Runge-Kutta integration of g'' = -delta g'/(c - rw) that shares no
code with the quadrature route.
"""

import math
from typing import Callable, Optional, Sequence

from ..exceptions import DomainError, StepUnderflowError
from ..logging_config import get_logger
from ..utils.numerics import integrate
from .model import DrawdownProblem, MarketParams
from .policy import hjb_residual
from .scale import ScaleContext

logger = get_logger(__name__)

ODE_STOP = 1e-12
ODE_REL_TOL = 1e-11
ODE_MAX_STEPS = 1 << 20


def g_constant_closed(c: float, market: MarketParams, alpha: float, m: float, w: float) -> float:
    """
    g(w, m) for a constant payout c.

    With beta = delta/r, A = c - r alpha m and X = c - rw:
    g = A / (r (beta + 1)) * (1 - (X/A)^(beta + 1)).
    """
    r = market.r
    floor = alpha * m
    ws = c / r
    if not floor <= w <= ws or floor >= ws:
        raise DomainError(f"alpha*m <= w <= c/r required (w={w!r}, alpha*m={floor!r}, c/r={ws!r})")
    beta = market.delta / r
    top = c - r * floor
    full = top / (r * (beta + 1.0))
    ratio = (c - r * w) / top
    if ratio <= 0.0:
        return full
    return full * -math.expm1((beta + 1.0) * math.log(ratio))


def _quadratic_guard(b: float, ws: float, r: float, floor: float, w: float) -> None:
    if not ws - r / (2.0 * b) <= floor:
        raise DomainError(f"alpha*m >= ws - r/(2b) required (alpha*m={floor!r})")
    if not floor <= w <= ws:
        raise DomainError(f"alpha*m <= w <= ws required (w={w!r})")


def g_quadratic_closed(
    b: float, ws: float, market: MarketParams, alpha: float, m: float, w: float
) -> float:
    """
    g(w, m) for c(w) = rw + b(ws - w)^2.

    exp(delta/(b(ws - alpha m))) times the integral of exp(-delta/(b(ws - y))),
    with the two exponentials merged so neither overflows.
    """
    floor = alpha * m
    _quadratic_guard(b, ws, market.r, floor, w)
    delta = market.delta
    head = delta / (b * (ws - floor))

    def integrand(y: float) -> float:
        gap = ws - y
        return math.exp(head - delta / (b * gap)) if gap > 0 else 0.0

    return integrate(integrand, floor, w)


def _v_quadratic_parts(
    b: float, ws: float, market: MarketParams, alpha: float, m: float, w: float
) -> tuple[float, float]:
    floor = alpha * m
    _quadratic_guard(b, ws, market.r, floor, w)
    if w >= ws:
        return math.inf, 0.0
    delta = market.delta
    x, x0 = ws - w, ws - floor
    particular = (1.0 / x - 1.0 / x0) / b + (2.0 / delta) * math.log(x / x0) + (
        2.0 * b / delta**2
    ) * (w - floor)
    slope = 1.0 / (b * x0 * x0) - 2.0 / (delta * x0) + 2.0 * b / delta**2
    return particular, slope


def v_quadratic_closed(
    b: float, ws: float, market: MarketParams, alpha: float, m: float, w: float
) -> float:
    """Feller function for c(w) = rw + b(ws - w)^2: P(w) - P'(alpha m) g(w, m)."""
    particular, slope = _v_quadratic_parts(b, ws, market, alpha, m, w)
    if math.isinf(particular):
        return math.inf
    return particular - slope * g_quadratic_closed(b, ws, market, alpha, m, w)


def v_quadratic_lower_bound(
    b: float, ws: float, market: MarketParams, alpha: float, m: float, w: float
) -> float:
    """
    P(w) - P'(alpha m)(w - alpha m), a lower bound on v since g(w, m) <= w - alpha m
    and P'(alpha m) > 0; it diverges like 1/(b(ws - w)).

    This is not the textbook form of the bound: the constant factor
    exp(delta / (b (ws - alpha m))) in front is omitted, so values are smaller
    than that form but the divergence at ws is the same.
    """
    particular, slope = _v_quadratic_parts(b, ws, market, alpha, m, w)
    return particular - slope * (w - alpha * m)


def _rk4_segment(
    rhs: Callable[[float, float], float], x0: float, g0: float, s0: float, x1: float, steps: int
) -> tuple[float, float]:
    h = (x1 - x0) / steps
    x, g, s = x0, g0, s0
    for _ in range(steps):
        k1g, k1s = s, rhs(x, s)
        k2g, k2s = s + 0.5 * h * k1s, rhs(x + 0.5 * h, s + 0.5 * h * k1s)
        k3g, k3s = s + 0.5 * h * k2s, rhs(x + 0.5 * h, s + 0.5 * h * k2s)
        k4g, k4s = s + h * k3s, rhs(x + h, s + h * k3s)
        g += h / 6.0 * (k1g + 2 * k2g + 2 * k3g + k4g)
        s += h / 6.0 * (k1s + 2 * k2s + 2 * k3s + k4s)
        x += h
    return g, s


def g_ode_states(
    problem: DrawdownProblem, m: float, w_targets: Sequence[float]
) -> list[tuple[float, float]]:
    """
    (g, g') at each target from the system g' = s, s' = -delta s/(c - rw).

    Each segment between consecutive targets is integrated with classical
    fourth-order Runge-Kutta, doubling the step count until two successive
    results agree to ODE_REL_TOL, the slope relative to g/(w - alpha m).

    Raises:
        DomainError: a target lies outside [alpha m, ws (1 - 1e-12)]
        StepUnderflowError: a segment needs more than ODE_MAX_STEPS steps or
            g' underflows
    """
    floor = problem.alpha * m
    stop = problem.ws * (1.0 - ODE_STOP) if math.isfinite(problem.ws) else math.inf
    order = sorted(range(len(w_targets)), key=lambda i: w_targets[i])
    delta = problem.delta

    def rhs(x: float, s: float) -> float:
        return -delta * s / float(problem.excess(x))

    out: list[Optional[tuple[float, float]]] = [None] * len(w_targets)
    x, g, s = floor, 0.0, 1.0
    for i in order:
        target = float(w_targets[i])
        if not floor <= target <= stop:
            raise DomainError(
                f"ODE target must lie in [alpha*m, w_s(1 - {ODE_STOP:g})] (w={target!r})"
            )
        if target > x:
            steps = max(8, math.ceil((target - x) / 1e-2))
            prev = _rk4_segment(rhs, x, g, s, target, steps)
            while True:
                steps *= 2
                if steps > ODE_MAX_STEPS:
                    raise StepUnderflowError(
                        f"step halving did not converge on [{x!r}, {target!r}]", (x, g)
                    )
                cur = _rk4_segment(rhs, x, g, s, target, steps)
                # slope tolerance scales with g/(w - alpha m)
                slope_scale = abs(cur[1]) + abs(cur[0]) / (target - floor)
                if abs(cur[0] - prev[0]) <= ODE_REL_TOL * abs(cur[0]) and abs(
                    cur[1] - prev[1]
                ) <= ODE_REL_TOL * slope_scale:
                    break
                prev = cur
            logger.debug("RK4 segment [%r, %r] settled at %d steps", x, target, steps)
            if cur[1] <= 0.0:
                raise StepUnderflowError(f"g' underflowed before w={target!r}", (x, g))
            x, (g, s) = target, cur
        out[i] = (g, s)
    return [state for state in out if state is not None]


def g_ode_oracle(problem: DrawdownProblem, m: float, w_targets: Sequence[float]) -> list[float]:
    """g(w, m) at each target by ODE integration."""
    return [g for g, _ in g_ode_states(problem, m, w_targets)]


def bvp_residual_scan(
    ctx: ScaleContext,
    n: float,
    grid: Sequence[tuple[float, float]],
    candidate: Optional[Callable[[float, float], float]] = None,
    h: Optional[float] = None,
) -> float:
    """
    Largest deviation of h_N from its boundary-value problem on a grid.

    Combines the interior ODE residual at every (w, m) of ``grid`` with
    |h(alpha m, m) - 1|, |h(N, N)| and |d h/dm (m, m)| at every m of the grid.

    Args:
        ctx: Scale context
        n: Cap N on the running maximum
        grid: Interior (w, m) points with alpha m < w < m < N
        candidate: Function h(w, m) to test instead of h_N
        h: Difference step; defaults to 1e-4 of the smallest domain width
    """
    if candidate is None:

        def candidate(w: float, m: float) -> float:
            return ctx._h_raw(w, m, n)

    widths = [m - ctx.alpha * m for _, m in grid]
    step = h if h is not None else 1e-4 * min(widths)
    worst = abs(candidate(n, n))
    for m in sorted({m for _, m in grid}):
        worst = max(worst, abs(candidate(ctx.alpha * m, m) - 1.0))
        slope = (candidate(m, m + step) - candidate(m, m - step)) / (2.0 * step)
        worst = max(worst, abs(slope))
    for w, m in grid:
        residual = hjb_residual(ctx, w, m, step, candidate=lambda x, m=m: candidate(x, m))
        worst = max(worst, abs(residual))
    return worst

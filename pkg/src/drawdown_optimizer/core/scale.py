"""
Scale-function machinery.

``ScaleContext`` evaluates the exponent integral, the scale function g, the
drawdown rate f, k, the bounded-maximum solution h_N, the extended scale
function p and the Feller function v for one problem. All of them are built
on the antiderivative P(u) of delta/(c(u) - ru), which is memoised on a sorted
anchor list so every new evaluation only integrates from its nearest
neighbour; the exponent is then P(y) - P(alpha*m).
"""

import bisect
import math
import threading
from collections import OrderedDict
from typing import Annotated, Literal, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, Field
from scipy.integrate import solve_ivp

from ..exceptions import (
    DomainError,
    IndeterminateLimitError,
    NonPositiveExcessError,
    StepUnderflowError,
)
from ..logging_config import get_logger
from ..utils.numerics import (
    Converged,
    Divergent,
    Tolerance,
    finite_diff,
    integrate,
    integrate_to_infinity,
)
from .model import DrawdownProblem

logger = get_logger(__name__)

# exp(-x) underflows to 0 for x above this
SATURATION = 745.0
MAX_ANCHORS = 1 << 18
MAX_BASES = 4096
MAX_K_VALUES = 1024
K_BLOWUP = 1e10
FELLER_SLOPE_SAMPLES = 8
FELLER_RATIO = 10.0


def saturated_exp(x: float) -> float:
    """exp(-x), flushed to 0 past the double-precision underflow point."""
    return 0.0 if x > SATURATION else math.exp(-x)


class _Anchors:
    """Sorted (x, value) pairs with neighbour lookup."""

    def __init__(self, limit: int = MAX_ANCHORS):
        self.xs: list[float] = []
        self.values: list[float] = []
        self.limit = limit

    def __len__(self) -> int:
        return len(self.xs)

    def insert(self, x: float, value: float) -> None:
        i = bisect.bisect_left(self.xs, x)
        if i < len(self.xs) and self.xs[i] == x:
            return
        if len(self.xs) >= self.limit:
            return
        self.xs.insert(i, x)
        self.values.insert(i, value)

    def nearest(self, x: float) -> tuple[float, float]:
        i = bisect.bisect_left(self.xs, x)
        if i == len(self.xs):
            i -= 1
        elif i > 0 and x - self.xs[i - 1] < self.xs[i] - x:
            i -= 1
        return self.xs[i], self.values[i]

    def below(self, x: float) -> Optional[tuple[float, float]]:
        i = bisect.bisect_right(self.xs, x)
        return (self.xs[i - 1], self.values[i - 1]) if i else None

    def above(self, x: float) -> Optional[tuple[float, float]]:
        i = bisect.bisect_left(self.xs, x)
        return (self.xs[i], self.values[i]) if i < len(self.xs) else None


class DivergesAtSafeLevel(BaseModel):
    kind: Literal["DivergesAtSafeLevel"] = "DivergesAtSafeLevel"


class ConvergesAtSafeLevel(BaseModel):
    kind: Literal["ConvergesAtSafeLevel"] = "ConvergesAtSafeLevel"
    v_limit: float


class InconclusiveVerdict(BaseModel):
    kind: Literal["Inconclusive"] = "Inconclusive"
    reason: str = ""


FellerVerdict = Annotated[
    Union[DivergesAtSafeLevel, ConvergesAtSafeLevel, InconclusiveVerdict],
    Field(discriminator="kind"),
]


class SlopeCondition(BaseModel):
    """Sampled check of -K < c'(w) - r < -1/K on (w_s - epsilon, w_s)."""

    status: Literal["holds", "fails", "not-applicable"]
    K: Optional[float] = None
    epsilon: float
    samples: list[tuple[float, float]] = Field(
        default_factory=list, description="(w, c'(w) - r) pairs approaching w_s"
    )


class FellerReport(BaseModel):
    m: float
    ws: float
    v_at_probe: list[tuple[float, float]]
    verdict: FellerVerdict
    slope_condition: SlopeCondition


class ScaleContext:
    """
    Scale functions of one problem, with thread-safe memoisation.

    A context can be shared between threads; cache writes are idempotent up
    to quadrature tolerance. Caches live as long as the context. Anchor lists
    stop growing at MAX_ANCHORS; the per-base g anchors and the normalised k
    values are least-recently-used maps capped at MAX_BASES and MAX_K_VALUES.
    """

    def __init__(self, problem: DrawdownProblem, tol: Optional[Tolerance] = None):
        self.problem = problem
        self.tol = tol or Tolerance.from_settings()
        self.alpha = problem.alpha
        self.delta = problem.delta
        self.r = problem.market.r
        self.ws = problem.ws

        self._lock = threading.RLock()
        reference = 0.5 * self.ws if math.isfinite(self.ws) else 1.0
        self._potential_anchors = _Anchors()
        self._potential_anchors.insert(reference, 0.0)
        self._g_anchors: OrderedDict[float, _Anchors] = OrderedDict()
        self._f_tail = _Anchors()
        if math.isfinite(self.ws):
            self._f_tail.insert(self.ws, 0.0)
        self._k_hat: OrderedDict[float, float] = OrderedDict()

    # ------------------------------------------------------------------
    # primitives

    def excess(self, w: float) -> float:
        return float(self.problem.excess(w))

    def _density(self, u: float) -> float:
        e = self.excess(u)
        if e <= 0:
            raise NonPositiveExcessError(
                f"c(w) - rw = {e!r} <= 0 at w={u!r} inside the integration range"
            )
        return self.delta / e

    def _potential(self, y: float) -> float:
        if y >= self.ws:
            return math.inf
        with self._lock:
            x0, p0 = self._potential_anchors.nearest(y)
        if x0 == y:
            return p0
        if y > x0:
            p = p0 + integrate(self._density, x0, y, self.tol)
        else:
            p = p0 - integrate(self._density, y, x0, self.tol)
        with self._lock:
            self._potential_anchors.insert(y, p)
        return p

    def _base(self, m: float) -> float:
        if m <= 0:
            raise DomainError(f"m > 0 required (m={m!r})")
        base = self.alpha * m
        if base >= self.ws:
            raise DomainError(f"alpha*m < w_s required (alpha*m={base!r}, w_s={self.ws!r})")
        return base

    def _clip(self, w: float, base: float) -> float:
        slack = self.tol.abs_tol
        if w < base - slack:
            raise DomainError(f"alpha*m <= w required (w={w!r}, alpha*m={base!r})")
        if w > self.ws + slack:
            raise DomainError(f"w <= w_s required (w={w!r}, w_s={self.ws!r})")
        return min(max(w, base), self.ws)

    # ------------------------------------------------------------------
    # exponent and g

    def exponent(self, m: float, y: float) -> float:
        """Integral of delta/(c(u) - ru) over [alpha*m, y]; inf at y = w_s."""
        base = self._base(m)
        y = self._clip(y, base)
        if y == base:
            return 0.0
        return self._potential(y) - self._potential(base)

    def g_w(self, w: float, m: float) -> float:
        """Derivative of g in w: exp(-exponent), in (0, 1]."""
        return saturated_exp(self.exponent(m, w))

    def _g_from(self, base: float, w: float) -> float:
        if w <= base:
            return 0.0
        with self._lock:
            anchors = self._g_anchors.get(base)
            if anchors is None:
                anchors = _Anchors()
                anchors.insert(base, 0.0)
                self._g_anchors[base] = anchors
                if len(self._g_anchors) > MAX_BASES:
                    self._g_anchors.popitem(last=False)
            else:
                self._g_anchors.move_to_end(base)
            start = anchors.below(w)
        assert start is not None
        x0, g0 = start
        if x0 == w:
            return g0
        p_base = self._potential(base)
        value = g0 + integrate(
            lambda y: saturated_exp(self._potential(y) - p_base), x0, w, self.tol
        )
        with self._lock:
            anchors.insert(w, value)
        return value

    def g(self, w: float, m: float) -> float:
        """
        Scale function g(w, m) = integral of exp(-exponent(m, y)) over [alpha*m, w].

        Args:
            w: Wealth, alpha*m <= w <= w_s
            m: Running maximum

        Returns:
            g(w, m), which never exceeds w - alpha*m
        """
        base = self._base(m)
        return self._g_from(base, self._clip(w, base))

    # ------------------------------------------------------------------
    # f, k, h_N

    def f(self, m: float) -> float:
        """alpha * (1/g(m, m) - delta/(c(alpha m) - r alpha m))."""
        base = self._base(m)
        if m > self.ws + self.tol.abs_tol:
            raise DomainError(f"m <= w_s required (m={m!r}, w_s={self.ws!r})")
        gm = self._g_from(base, min(m, self.ws))
        return self.alpha * (1.0 / gm - self._density(base))

    def drawdown_intensity(self, y: float) -> float:
        """g_w(y, y) / g(y, y), the integrand of k when w_s = inf."""
        base = self._base(y)
        top = min(y, self.ws)
        return saturated_exp(self._potential(top) - self._potential(base)) / self._g_from(
            base, top
        )

    def _f_integral_to_ws(self, m: float) -> float:
        with self._lock:
            start = self._f_tail.above(m)
        assert start is not None
        x1, tail = start
        if x1 == m:
            return tail
        value = tail + integrate(self.f, m, x1, self.tol)
        with self._lock:
            self._f_tail.insert(m, value)
        return value

    def f_integral(self, m: float, n: float) -> float:
        """Integral of f over [m, n]."""
        if n < m:
            raise DomainError(f"m <= N required (m={m!r}, N={n!r})")
        if math.isfinite(self.ws):
            if n > self.ws + self.tol.abs_tol:
                raise DomainError(f"N <= w_s required (N={n!r}, w_s={self.ws!r})")
            return self._f_integral_to_ws(m) - self._f_integral_to_ws(min(n, self.ws))
        return integrate(self.f, m, n, self.tol)

    def k(self, m: float) -> float:
        """
        exp(-integral of f over [m, w_s]).

        When w_s = inf this is the normalised value
        exp(-integral of g_w(y, y)/g(y, y) over [m, inf)), which is 0 when the
        integral diverges.

        Raises:
            IndeterminateLimitError: the improper integral cannot be classified
        """
        if m <= 0:
            raise DomainError(f"m > 0 required (m={m!r})")
        if math.isfinite(self.ws):
            if m > self.ws + self.tol.abs_tol:
                raise DomainError(f"m <= w_s required (m={m!r}, w_s={self.ws!r})")
            if m >= self.ws:
                return 1.0
            return math.exp(-self._f_integral_to_ws(m))

        with self._lock:
            cached = self._k_hat.get(m)
            if cached is not None:
                self._k_hat.move_to_end(m)
        if cached is not None:
            return cached
        result = integrate_to_infinity(
            self.drawdown_intensity, m, self.tol, window=max(m, 1.0), blowup=K_BLOWUP
        )
        if isinstance(result, Converged):
            value = saturated_exp(result.value)
        elif isinstance(result, Divergent) and result.direction > 0:
            value = 0.0
        else:
            raise IndeterminateLimitError(
                f"integral of g_w(y,y)/g(y,y) over [{m!r}, inf) is indeterminate: {result}"
            )
        logger.debug("k(%r) = %r (%s)", m, value, type(result).__name__)
        with self._lock:
            self._k_hat[m] = value
            if len(self._k_hat) > MAX_K_VALUES:
                self._k_hat.popitem(last=False)
        return value

    def _h_raw(self, w: float, m: float, n: float, rate_scale: float = 1.0) -> float:
        top = min(n, self.ws)
        decay = math.exp(-rate_scale * self.f_integral(m, top))
        return 1.0 - decay * self.g(w, m) / self._g_from(self._base(top), top)

    def h_N(self, w: float, m: float, n: float) -> float:
        """Solution of the boundary-value problem with the maximum capped at N."""
        base = self._base(m)
        slack = self.tol.abs_tol
        if not (base - slack <= w <= m + slack and m <= n + slack):
            raise DomainError(
                f"alpha*m <= w <= m <= N required (w={w!r}, m={m!r}, N={n!r})"
            )
        if n > self.ws + slack:
            raise DomainError(f"N <= w_s required (N={n!r}, w_s={self.ws!r})")
        return self._h_raw(w, m, n)

    # ------------------------------------------------------------------
    # extended scale function and Feller function

    def p(self, w: float, m: float) -> float:
        """Scale function of the process under the extended strategy."""
        base = self._base(m)
        if w < base:
            return w - base
        return self._g_from(base, min(w, self.ws))

    def v_profile(self, m: float, targets: Sequence[float]) -> list[float]:
        """
        Feller function v(w, m) at several w, from one stiff ODE solve.

        v' = B and B' = delta/e^2 - (delta/e) B with v = B = 0 at alpha*m,
        where e = c(w) - rw.
        """
        base = self._base(m)
        values: dict[float, float] = {}
        interior = []
        for t in targets:
            t = float(t)
            if t < base - self.tol.abs_tol:
                raise DomainError(f"alpha*m <= w required (w={t!r}, alpha*m={base!r})")
            if t <= base:
                values[t] = 0.0
            elif t >= self.ws:
                values[t] = math.inf
            else:
                interior.append(t)
        if interior:
            points = np.unique(np.asarray(interior))
            delta = self.delta

            def rhs(y: float, state: np.ndarray) -> list[float]:
                q = self._density(y)
                return [state[1], q / self.excess(y) - q * state[1]]

            def jac(y: float, state: np.ndarray) -> list[list[float]]:
                return [[0.0, 1.0], [0.0, -delta / self.excess(y)]]

            sol = solve_ivp(
                rhs,
                (base, float(points[-1])),
                [0.0, 0.0],
                method="Radau",
                t_eval=points,
                jac=jac,
                rtol=max(self.tol.rel_tol, 1e-12),
                atol=1e-12,
            )
            if not sol.success or sol.t.size != points.size:
                last = (float(sol.t[-1]), float(sol.y[0, -1])) if sol.t.size else None
                raise StepUnderflowError(f"v integration stopped: {sol.message}", last)
            values.update(zip(points.tolist(), sol.y[0].tolist()))
        return [values[float(t)] for t in targets]

    def v(self, w: float, m: float) -> float:
        """Feller test function v(w, m); inf at w_s."""
        return self.v_profile(m, [w])[0]

    def v_quadrature(self, w: float, m: float) -> float:
        """
        v(w, m) as a single integral over z of delta/e(z)^2 times the inner
        integral of exp(-(P(y) - P(z))) over [z, w].
        """
        base = self._base(m)
        w = self._clip(w, base)
        if w >= self.ws:
            return math.inf

        def outer(z: float) -> float:
            e = self.excess(z)
            return self.delta / (e * e) * self._g_from(z, w)

        return integrate(outer, base, w, self.tol)

    def slope_condition(self, m: float) -> SlopeCondition:
        """Sample c'(w) - r on (w_s - epsilon, w_s)."""
        base = self._base(m)
        eps = min(0.1 * (self.ws - base), 0.05 * self.ws)

        def rate(x: float) -> float:
            return float(self.problem.rate(x))

        samples = []
        for j in range(1, FELLER_SLOPE_SAMPLES + 1):
            gap = eps * 2.0**-j
            w = self.ws - gap
            samples.append((w, finite_diff(rate, w, 1e-3 * gap, 1) - self.r))

        slopes = np.array([s for _, s in samples])
        size = np.abs(slopes)
        if size[0] > 0 and size[-1] > FELLER_RATIO * size[0]:
            return SlopeCondition(status="not-applicable", epsilon=eps, samples=samples)
        if np.all(slopes < 0) and size.max() <= FELLER_RATIO * size.min():
            bound = 1.01 * max(float(size.max()), 1.0 / float(size.min()))
            return SlopeCondition(status="holds", K=bound, epsilon=eps, samples=samples)
        return SlopeCondition(status="fails", epsilon=eps, samples=samples)

    def feller_report(self, m: float, probes: int = 12) -> FellerReport:
        """
        Probe v at w_k = w_s - (w_s - alpha*m) 2^-k, k = 1..probes.

        Increments of v per probe are increments per ln 2 of -ln(w_s - w), so
        a growing increment sequence is superlinear growth in that variable.
        """
        if not math.isfinite(self.ws):
            raise DomainError("the Feller test needs a finite safe level")
        if probes < 3:
            raise ValueError(f"probes must be >= 3, got {probes}")
        base = self._base(m)
        width = self.ws - base
        points = [self.ws - width * 2.0**-k for k in range(1, probes + 1)]
        values = self.v_profile(m, points)
        condition = self.slope_condition(m)

        steps = np.diff(np.asarray([0.0] + values))
        ratios = steps[1:] / steps[:-1] if steps.size > 1 else np.array([])
        tail = ratios[-3:]
        verdict: Union[DivergesAtSafeLevel, ConvergesAtSafeLevel, InconclusiveVerdict]
        if condition.status == "not-applicable":
            verdict = InconclusiveVerdict(reason="c'(w) - r is unbounded near w_s")
        elif condition.status == "holds":
            verdict = DivergesAtSafeLevel()
        elif tail.size == 3 and np.all(steps[-4:] > 0) and np.all(tail >= 1.5):
            verdict = DivergesAtSafeLevel()
        elif tail.size == 3 and np.all(steps[-4:] > 0) and np.all(tail < 0.9):
            q = float(tail[-1])
            verdict = ConvergesAtSafeLevel(v_limit=values[-1] + float(steps[-1]) * q / (1 - q))
        else:
            verdict = InconclusiveVerdict(reason="v growth is neither superlinear nor geometric")
        logger.info("Feller report at m=%r: %s, slope condition %s", m, verdict.kind, condition.status)
        return FellerReport(
            m=m,
            ws=self.ws,
            v_at_probe=list(zip(points, values)),
            verdict=verdict,
            slope_condition=condition,
        )

    def cache_sizes(self) -> dict[str, int]:
        with self._lock:
            return {
                "potential": len(self._potential_anchors),
                "g_bases": len(self._g_anchors),
                "f_tail": len(self._f_tail),
                "k_hat": len(self._k_hat),
            }


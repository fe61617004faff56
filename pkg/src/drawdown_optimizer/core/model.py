"""
Market, problem and regime definitions.

Validation of a payout against the structural assumptions (continuity,
non-negativity, monotonicity, a single downward crossing of rw), the safe
level w_s, and the classification of problems with w_s = inf.
"""

import math
from dataclasses import dataclass
from typing import Annotated, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..config import get_settings
from ..exceptions import AmbiguousCrossingError, DomainError, PayoutValidationError
from ..logging_config import get_logger
from ..utils.numerics import DEFAULT_TOLERANCE, Tolerance, find_root, geometric_grid
from .payouts import ArrayLike, PayoutSpec

logger = get_logger(__name__)

GRID_FLOOR = 1e-6
ViolationKind = Literal[
    "negative",
    "decreasing",
    "multiple_crossings",
    "no_safe_region",
    "wrong_crossing_direction",
]


class MarketParams(BaseModel):
    """Riskless rate r, drift mu and volatility sigma of the risky asset."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    r: float = Field(gt=0)
    mu: float
    sigma: float = Field(gt=0)

    @model_validator(mode="after")
    def drift_exceeds_rate(self) -> "MarketParams":
        if not self.mu > self.r:
            raise ValueError(f"mu must exceed r (mu={self.mu}, r={self.r})")
        return self

    @property
    def delta(self) -> float:
        """Half the squared Sharpe ratio."""
        return 0.5 * ((self.mu - self.r) / self.sigma) ** 2


class FiniteSafe(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["FiniteSafe"] = "FiniteSafe"
    ws: float = Field(gt=0)


class InfiniteSafeCertainDrawdown(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["InfiniteSafeCertainDrawdown"] = "InfiniteSafeCertainDrawdown"
    L: float = Field(gt=0)
    w0: float = Field(gt=0)


class InfiniteSafeOther(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["InfiniteSafeOther"] = "InfiniteSafeOther"


Regime = Annotated[
    Union[FiniteSafe, InfiniteSafeCertainDrawdown, InfiniteSafeOther],
    Field(discriminator="kind"),
]


class Violation(BaseModel):
    """One way a payout breaks the structural assumptions."""

    model_config = ConfigDict(frozen=True)

    kind: ViolationKind
    w: Optional[float] = None
    detail: str = ""

    def __str__(self) -> str:
        where = f" at w={self.w:.6g}" if self.w is not None else ""
        return f"{self.kind}{where}: {self.detail}" if self.detail else f"{self.kind}{where}"


class DrawdownProblem(BaseModel):
    """A validated problem: market, payout, drawdown fraction and regime."""

    model_config = ConfigDict(frozen=True)

    market: MarketParams
    payout: PayoutSpec
    alpha: float = Field(gt=0, lt=1)
    regime: Regime

    @property
    def ws(self) -> float:
        return self.regime.ws if isinstance(self.regime, FiniteSafe) else math.inf

    @property
    def delta(self) -> float:
        return self.market.delta

    def rate(self, w: ArrayLike) -> ArrayLike:
        return self.payout.rate(w, self.market.r)

    def excess(self, w: ArrayLike) -> ArrayLike:
        return excess(self.payout, self.market, w)

    def check_point(self, w: float, m: float, tol: float = 0.0) -> None:
        """
        Raise DomainError unless (w, m) lies in the problem domain.

        The domain is alpha*m <= w <= min(m, ws); ``tol`` widens it at the edges.
        """
        if not (math.isfinite(w) and math.isfinite(m)):
            raise DomainError(f"w and m must be finite (w={w!r}, m={m!r})")
        if m <= 0:
            raise DomainError(f"m > 0 required (m={m!r})")
        floor = self.alpha * m
        if w < floor - tol:
            raise DomainError(f"alpha*m <= w required (w={w!r}, alpha*m={floor!r})")
        if w > m + tol:
            raise DomainError(f"w <= m required (w={w!r}, m={m!r})")
        if w > self.ws + tol:
            raise DomainError(f"w <= w_s required (w={w!r}, w_s={self.ws!r})")
        guard = self.payout.monotone_from(self.market.r)
        if guard > 0 and floor < guard:
            raise DomainError(
                f"alpha*m >= {guard!r} required for {self.payout.kind} payouts "
                f"(alpha*m={floor!r})"
            )

    def in_domain(self, w: float, m: float) -> bool:
        try:
            self.check_point(w, m)
        except DomainError:
            return False
        return True


@dataclass(frozen=True)
class StatePoint:
    w: float
    m: float

    def check(self, problem: DrawdownProblem) -> "StatePoint":
        problem.check_point(self.w, self.m)
        return self


def excess(payout: PayoutSpec, market: MarketParams, w: ArrayLike) -> ArrayLike:
    """c(w) - r*w."""
    c = payout.rate(w, market.r)
    if isinstance(c, float):
        return c - market.r * float(w)
    return c - market.r * np.asarray(w, dtype=float)


def _validation_grid(
    payout: PayoutSpec, market: MarketParams, grid_size: int, w_max: float
) -> np.ndarray:
    grid = geometric_grid(GRID_FLOOR, w_max, grid_size)
    extra = [x for x in payout.grid_points() if GRID_FLOOR < x < w_max]
    ws = payout.analytic_safe_level(market.r)
    if ws is not None and math.isfinite(ws) and ws < w_max:
        extra += [ws * (1 - 1e-6), ws * (1 + 1e-6)]
    grid = np.union1d(grid, np.asarray(extra, dtype=float))
    floor = payout.monotone_from(market.r)
    return grid[grid >= floor] if floor > 0 else grid


def _sign_changes(values: np.ndarray) -> list[int]:
    """Indices i where the sign flips between nonzero neighbours."""
    nz = np.flatnonzero(values != 0)
    signs = np.sign(values[nz])
    flips = np.flatnonzero(signs[1:] != signs[:-1])
    return [int(nz[i]) for i in flips]


def validate(
    payout: PayoutSpec,
    market: MarketParams,
    grid_size: Optional[int] = None,
    tol: Tolerance = DEFAULT_TOLERANCE,
    w_max: Optional[float] = None,
) -> list[Violation]:
    """
    Check a payout on a geometric wealth grid.

    Args:
        payout: Payout to check
        market: Market parameters
        grid_size: Grid points (>= 16); defaults to the configured size
        tol: ``abs_tol`` is the slack allowed in the monotonicity check
        w_max: Upper end of the grid; defaults to the configured search bound

    Returns:
        List of violations, empty when the payout is admissible
    """
    settings = get_settings()
    grid_size = settings.validation_grid_size if grid_size is None else grid_size
    w_max = settings.w_max_search if w_max is None else w_max
    if grid_size < 16:
        raise ValueError(f"grid_size must be >= 16, got {grid_size}")

    grid = _validation_grid(payout, market, grid_size, w_max)
    c = np.asarray(payout.rate(grid, market.r))
    violations: list[Violation] = []

    negative = np.flatnonzero(c < 0)
    if negative.size:
        i = int(negative[0])
        violations.append(Violation(kind="negative", w=float(grid[i]), detail=f"c={c[i]:.6g}"))

    drops = np.flatnonzero(np.diff(c) < -tol.abs_tol)
    if drops.size:
        i = int(drops[0])
        violations.append(
            Violation(
                kind="decreasing",
                w=float(grid[i + 1]),
                detail=f"c falls from {c[i]:.6g} to {c[i + 1]:.6g}",
            )
        )

    e = c - market.r * grid
    flips = _sign_changes(e)
    if len(flips) > 1:
        violations.append(
            Violation(
                kind="multiple_crossings",
                w=float(grid[flips[1]]),
                detail=f"c(w) - rw changes sign {len(flips)} times",
            )
        )
    elif len(flips) == 1:
        i = flips[0]
        if e[i] < 0:
            violations.append(
                Violation(
                    kind="wrong_crossing_direction",
                    w=float(grid[i]),
                    detail="c(w) - rw crosses zero upwards",
                )
            )
    elif not np.any(e > 0):
        violations.append(
            Violation(kind="no_safe_region", detail="c(w) <= rw on the whole grid")
        )
    return violations


def safe_level(
    payout: PayoutSpec,
    market: MarketParams,
    tol: Tolerance = DEFAULT_TOLERANCE,
    grid_size: Optional[int] = None,
    w_max: Optional[float] = None,
) -> float:
    """
    Wealth where c(w) = rw, or inf when c(w) > rw up to the search bound.

    Raises:
        AmbiguousCrossingError: c(w) - rw changes sign more than once
    """
    known = payout.analytic_safe_level(market.r)
    if known is not None:
        return known

    settings = get_settings()
    grid_size = settings.validation_grid_size if grid_size is None else grid_size
    w_max = settings.w_max_search if w_max is None else w_max

    grid = _validation_grid(payout, market, grid_size, w_max)
    e = np.asarray(excess(payout, market, grid))
    zeros = np.flatnonzero(e == 0)
    flips = _sign_changes(e)
    if len(flips) > 1:
        raise AmbiguousCrossingError(
            f"c(w) - rw changes sign {len(flips)} times on (0, {w_max:g}]"
        )
    if not flips:
        if zeros.size and np.all(e[: zeros[0]] > 0):
            return float(grid[zeros[0]])
        return math.inf

    i = flips[0]
    nz = np.flatnonzero(e[i + 1 :] != 0)
    j = i + 1 + int(nz[0])
    lo, hi = float(grid[i]), float(grid[j])
    return find_root(lambda w: float(excess(payout, market, w)), lo, hi, tol)


def classify_regime(
    payout: PayoutSpec,
    market: MarketParams,
    tol: Tolerance = DEFAULT_TOLERANCE,
    grid_size: Optional[int] = None,
    w_max: Optional[float] = None,
) -> Union[FiniteSafe, InfiniteSafeCertainDrawdown, InfiniteSafeOther]:
    """
    Regime of a validated payout.

    With w_s = inf the excess is scanned on a geometric grid; a non-decreasing,
    positive excess over the upper half of the grid is taken as the witness
    that excess stays above L = half its minimum there.
    """
    ws = safe_level(payout, market, tol, grid_size, w_max)
    if math.isfinite(ws):
        return FiniteSafe(ws=ws)

    settings = get_settings()
    grid_size = settings.validation_grid_size if grid_size is None else grid_size
    w_max = settings.w_max_search if w_max is None else w_max

    grid = geometric_grid(1.0, max(w_max, 2.0), grid_size)
    e = np.asarray(excess(payout, market, grid))
    half = grid_size // 2
    tail = e[half:]
    if np.all(tail > 0) and np.all(np.diff(tail) >= -tol.abs_tol):
        regime: Union[InfiniteSafeCertainDrawdown, InfiniteSafeOther] = (
            InfiniteSafeCertainDrawdown(L=0.5 * float(tail.min()), w0=float(grid[half]))
        )
    else:
        regime = InfiniteSafeOther()
    logger.info("w_s = inf; regime %s", regime.kind)
    return regime


def build_problem(
    market: MarketParams,
    payout: PayoutSpec,
    alpha: float,
    strict: bool = True,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> DrawdownProblem:
    """
    Validate a payout and attach its regime.

    Args:
        market: Market parameters
        payout: Payout function
        alpha: Drawdown fraction in (0, 1)
        strict: Raise on validation failures instead of logging them

    Raises:
        PayoutValidationError: the payout fails validation and ``strict`` is set
    """
    violations = validate(payout, market, tol=tol)
    if violations:
        if strict:
            raise PayoutValidationError(violations)
        for v in violations:
            logger.warning("payout violation: %s", v)
    regime = classify_regime(payout, market, tol)
    logger.info("payout %s classified as %s", payout.label(), regime.kind)
    return DrawdownProblem(market=market, payout=payout, alpha=alpha, regime=regime)

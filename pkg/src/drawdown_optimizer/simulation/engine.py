"""
Monte Carlo engine for the controlled wealth process.

Euler-Maruyama steps of dW = [rW + (mu - r)pi - c(W)]dt + sigma pi dB with the
running maximum tracked alongside. Paths are processed in fixed-size blocks,
each with its own counter-based Philox stream keyed by (seed, block index), so
the result does not depend on how blocks are scheduled across threads.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..config import get_settings
from ..core.model import DrawdownProblem
from ..exceptions import ConfigError, DomainError, describe_validation_error
from ..logging_config import get_logger
from .strategies import Strategy, _Strategy

logger = get_logger(__name__)

CENSOR_WARNING = 0.005
ArrayOrFloat = Union[float, np.ndarray]


class SimConfig(BaseModel):
    """Time step, horizon, path count, seed and absorption bands."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    dt: float = Field(gt=0)
    horizon: float = Field(gt=0)
    n_paths: int = Field(ge=1)
    seed: int = Field(ge=0, lt=2**64)
    eps_safe: Optional[float] = Field(
        default=None, ge=0, description="Absorb at W >= w_s - eps_safe; default 1e-4 (w_s - alpha m0)"
    )
    eps_barrier: float = Field(default=0.0, ge=0)
    block_size: int = Field(default=4096, ge=1)

    @model_validator(mode="after")
    def horizon_covers_step(self) -> "SimConfig":
        if self.horizon < self.dt:
            raise ValueError(f"horizon ({self.horizon}) must be >= dt ({self.dt})")
        return self

    @classmethod
    def parse(cls, data: dict[str, Any]) -> "SimConfig":
        """Validate a mapping, raising ConfigError with field paths."""
        try:
            return cls.model_validate(data)
        except ValidationError as e:
            raise ConfigError(describe_validation_error(e)) from e

    @property
    def n_steps(self) -> int:
        return max(1, math.ceil(self.horizon / self.dt - 1e-9))


class SimEstimate(BaseModel):
    p_drawdown: float
    stderr: float
    n_paths: int
    n_drawdown: int
    n_safe_absorbed: int
    n_censored: int
    mean_hit_time: Optional[float] = Field(
        default=None, description="Mean drawdown time among drawdown paths"
    )


class StrategyResult(BaseModel):
    strategy: str
    estimate: SimEstimate


def step(
    problem: DrawdownProblem,
    strategy: _Strategy,
    w: ArrayOrFloat,
    m: ArrayOrFloat,
    dt: float,
    z: ArrayOrFloat,
) -> tuple[ArrayOrFloat, ArrayOrFloat]:
    """One Euler-Maruyama step; returns (w', max(m, w'))."""
    scalar = np.ndim(w) == 0
    w_arr = np.atleast_1d(np.asarray(w, dtype=float))
    m_arr = np.broadcast_to(np.asarray(m, dtype=float), w_arr.shape)
    z_arr = np.broadcast_to(np.asarray(z, dtype=float), w_arr.shape)
    market = problem.market
    pi = strategy.amount(problem, w_arr, m_arr)
    drift = market.r * w_arr + (market.mu - market.r) * pi - np.asarray(problem.rate(w_arr))
    w_next = w_arr + drift * dt + market.sigma * pi * math.sqrt(dt) * z_arr
    m_next = np.maximum(m_arr, w_next)
    if scalar:
        return float(w_next[0]), float(m_next[0])
    return w_next, m_next


@dataclass
class _BlockResult:
    n_drawdown: int
    n_safe: int
    n_censored: int
    hit_time_sum: float


def _block_stream(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))


def _run_block(
    problem: DrawdownProblem,
    strategy: _Strategy,
    w0: float,
    m0: float,
    config: SimConfig,
    block: int,
    size: int,
    safe_level: float,
) -> _BlockResult:
    rng = _block_stream(config.seed, block)
    alpha = problem.alpha
    w = np.full(size, w0)
    m = np.full(size, m0)
    alive = np.arange(size)
    n_drawdown = n_safe = 0
    hit_time_sum = 0.0
    for k in range(config.n_steps):
        # a full block of normals every step keeps path i on the same increments
        z = rng.standard_normal(size)
        if alive.size == 0:
            break
        w_alive, m_alive = step(problem, strategy, w[alive], m[alive], config.dt, z[alive])
        w[alive], m[alive] = w_alive, m_alive
        down = w_alive <= alpha * m_alive + config.eps_barrier
        safe = ~down & (w_alive >= safe_level)
        if down.any():
            hits = int(down.sum())
            n_drawdown += hits
            hit_time_sum += hits * (k + 1) * config.dt
        n_safe += int(safe.sum())
        alive = alive[~(down | safe)]
    return _BlockResult(n_drawdown, n_safe, int(alive.size), hit_time_sum)


def estimate_drawdown(
    problem: DrawdownProblem,
    strategy: _Strategy,
    w0: float,
    m0: float,
    config: SimConfig,
    threads: Optional[int] = None,
) -> SimEstimate:
    """
    Estimate the probability that wealth falls to alpha times its maximum.

    Paths end at drawdown (W <= alpha M + eps_barrier), at absorption near
    the safe level (W >= w_s - eps_safe) or at the horizon (censored).

    Args:
        problem: Problem definition
        strategy: Investment strategy
        w0: Initial wealth, alpha*m0 <= w0 <= m0
        m0: Initial running maximum
        config: Simulation settings
        threads: Worker threads; defaults to the configured worker count

    Returns:
        Counts, the drawdown frequency and its standard error
    """
    if not (m0 > 0 and problem.alpha * m0 <= w0 <= m0):
        raise DomainError(
            f"start must satisfy alpha*m0 <= w0 <= m0 (w0={w0!r}, m0={m0!r})"
        )
    if threads is None:
        threads = get_settings().worker_count()

    ws = problem.ws
    if math.isfinite(ws):
        eps_safe = config.eps_safe if config.eps_safe is not None else 1e-4 * (ws - problem.alpha * m0)
        safe_level = ws - eps_safe
    else:
        safe_level = math.inf
    n = config.n_paths

    if w0 <= problem.alpha * m0 + config.eps_barrier:
        return _estimate(n, n, 0, 0, 0.0)
    if w0 >= safe_level:
        return _estimate(n, 0, n, 0, 0.0)

    blocks = [
        (b, min(config.block_size, n - b * config.block_size))
        for b in range(math.ceil(n / config.block_size))
    ]
    with ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
        results = list(
            executor.map(
                lambda job: _run_block(problem, strategy, w0, m0, config, job[0], job[1], safe_level),
                blocks,
            )
        )
    logger.info("simulated %d paths in %d blocks on %d threads", n, len(blocks), threads)

    n_drawdown = sum(r.n_drawdown for r in results)
    n_safe = sum(r.n_safe for r in results)
    n_censored = sum(r.n_censored for r in results)
    hit_time_sum = math.fsum(r.hit_time_sum for r in results)
    estimate = _estimate(n, n_drawdown, n_safe, n_censored, hit_time_sum)
    if n_censored > CENSOR_WARNING * n:
        logger.warning(
            "%.2f%% of paths censored at horizon %g; increase horizon or eps_safe",
            100.0 * n_censored / n,
            config.horizon,
        )
    return estimate


def _estimate(n: int, n_drawdown: int, n_safe: int, n_censored: int, hit_time_sum: float) -> SimEstimate:
    p = n_drawdown / n
    return SimEstimate(
        p_drawdown=p,
        stderr=math.sqrt(p * (1.0 - p) / n),
        n_paths=n,
        n_drawdown=n_drawdown,
        n_safe_absorbed=n_safe,
        n_censored=n_censored,
        mean_hit_time=hit_time_sum / n_drawdown if n_drawdown else None,
    )


def compare_strategies(
    problem: DrawdownProblem,
    strategies: Sequence[_Strategy],
    w0: float,
    m0: float,
    config: SimConfig,
    threads: Optional[int] = None,
) -> list[StrategyResult]:
    """
    Estimate every strategy on common random numbers.

    Logs a warning when the optimal strategy is beaten by more than three
    combined standard errors.
    """
    rows = [
        StrategyResult(
            strategy=s.label, estimate=estimate_drawdown(problem, s, w0, m0, config, threads)
        )
        for s in strategies
    ]
    optimal = [r for r in rows if r.strategy == "optimal"]
    if optimal:
        best = optimal[0].estimate
        for row in rows:
            bound = 3.0 * math.hypot(best.stderr, row.estimate.stderr)
            if best.p_drawdown > row.estimate.p_drawdown + bound:
                logger.warning(
                    "optimal strategy (p=%.4f) beaten by %s (p=%.4f)",
                    best.p_drawdown,
                    row.strategy,
                    row.estimate.p_drawdown,
                )
    return rows


__all__ = [
    "SimConfig",
    "SimEstimate",
    "Strategy",
    "StrategyResult",
    "compare_strategies",
    "estimate_drawdown",
    "step",
]

"""Monte Carlo endpoint."""

import time

from fastapi import APIRouter, Depends, HTTPException, Request

from ...config import Settings, get_settings
from ...exceptions import DrawdownError
from ...simulation.engine import estimate_drawdown
from ...simulation.strategies import parse_strategy
from ..errors import resolve_problem, to_http
from ..middleware.rate_limit import limiter
from ..models import SimulateRequest, SimulateResponse

router = APIRouter(prefix="/simulate", tags=["simulate"])


@router.post("", response_model=SimulateResponse)
@limiter.limit(get_settings().rate_limit_simulate)
def simulate(
    request: Request,
    body: SimulateRequest,
    settings: Settings = Depends(get_settings),
) -> SimulateResponse:
    """
    Estimate the probability of drawdown by simulation.

    Deterministic for a given seed. The path count is capped by
    ``DRAWDOWN_MAX_PATHS``.
    """
    if body.config.n_paths > settings.max_paths:
        raise HTTPException(
            status_code=400,
            detail=f"n_paths exceeds maximum allowed ({settings.max_paths})",
        )
    try:
        start_time = time.time()
        problem = resolve_problem(body)
        strategy = parse_strategy(body.strategy, problem, body.w0)
        estimate = estimate_drawdown(problem, strategy, body.w0, body.m0, body.config)
        execution_time = time.time() - start_time
    except DrawdownError as e:
        raise to_http(e) from e
    return SimulateResponse(
        strategy=strategy.label, estimate=estimate, execution_time=round(execution_time, 3)
    )

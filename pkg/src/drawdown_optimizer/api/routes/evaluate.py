"""Point evaluation endpoint."""

import math

from fastapi import APIRouter, Request

from ...config import get_settings
from ...core.policy import evaluate_point
from ...core.scale import ScaleContext
from ...exceptions import DrawdownError
from ..errors import resolve_problem, to_http
from ..middleware.rate_limit import limiter
from ..models import EvaluateRequest, EvaluateResponse

router = APIRouter(prefix="/evaluate", tags=["evaluate"])


@router.post("", response_model=EvaluateResponse)
@limiter.limit(get_settings().rate_limit_default)
def evaluate(request: Request, body: EvaluateRequest) -> EvaluateResponse:
    """
    Minimum probability of drawdown, the optimal amount, g and k at (w, m).

    Same values as ``drawdown-optimizer evaluate``.
    """
    try:
        problem = resolve_problem(body)
        point = evaluate_point(ScaleContext(problem), body.w, body.m, body.allow_outside)
    except DrawdownError as e:
        raise to_http(e) from e
    values = point.model_dump()
    values["w_s"] = point.w_s if math.isfinite(point.w_s) else None
    return EvaluateResponse(**values)

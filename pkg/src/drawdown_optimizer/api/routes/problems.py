"""Canonical problem discovery endpoints."""

import math

from fastapi import APIRouter, HTTPException

from ...exceptions import DrawdownError
from ...problem_files import find_problem_path, list_problems, load_problem_file
from ..errors import to_http
from ..models import ProblemInfoResponse, ProblemListResponse

router = APIRouter(prefix="/problems", tags=["problems"])


@router.get("", response_model=ProblemListResponse)
async def get_problems() -> ProblemListResponse:
    """List the canonical problems."""
    names = list_problems()
    return ProblemListResponse(problems=names, total_count=len(names))


@router.get("/{name}", response_model=ProblemInfoResponse)
async def get_problem(name: str) -> ProblemInfoResponse:
    """A canonical problem with its safe level and regime."""
    # only packaged problems, never arbitrary paths
    if name not in list_problems() or find_problem_path(name) is None:
        raise HTTPException(
            status_code=404,
            detail=f"Problem '{name}' not found. Use /problems to list problems.",
        )
    try:
        document = load_problem_file(name)
        problem = document.to_problem()
    except DrawdownError as e:
        raise to_http(e) from e
    return ProblemInfoResponse(
        name=name,
        description=document.description,
        definition=document.model_dump(include={"market", "payout", "alpha"}),
        w_s=problem.ws if math.isfinite(problem.ws) else None,
        regime=problem.regime.kind,
    )

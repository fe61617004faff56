"""Mapping of library errors onto HTTP errors."""

from fastapi import HTTPException

from ..core.model import DrawdownProblem
from ..exceptions import ConfigError, DomainError, DrawdownError, PayoutValidationError, ProblemFileError
from ..problem_files import find_problem_path, load_problem
from .models import ProblemRef


def to_http(error: DrawdownError) -> HTTPException:
    """400 for bad input, 404 for unknown problems, 500 for numerical failures."""
    if isinstance(error, ProblemFileError) and "not found" in str(error):
        return HTTPException(status_code=404, detail=str(error))
    if isinstance(error, (DomainError, PayoutValidationError, ConfigError, ProblemFileError)):
        return HTTPException(status_code=400, detail=str(error))
    return HTTPException(status_code=500, detail=f"{type(error).__name__}: {error}")


def resolve_problem(ref: ProblemRef) -> DrawdownProblem:
    if ref.problem is not None:
        return ref.problem.to_problem()
    if find_problem_path(ref.problem_name or "") is None:
        raise HTTPException(
            status_code=404,
            detail=f"Problem '{ref.problem_name}' not found. Use /problems to list problems.",
        )
    return load_problem(ref.problem_name or "")

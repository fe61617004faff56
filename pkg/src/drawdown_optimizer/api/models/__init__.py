"""API models package."""

from .requests import EvaluateRequest, ProblemRef, SimulateRequest
from .responses import (
    ErrorResponse,
    EvaluateResponse,
    HealthResponse,
    ProblemInfoResponse,
    ProblemListResponse,
    SimulateResponse,
)

__all__ = [
    "ErrorResponse",
    "EvaluateRequest",
    "EvaluateResponse",
    "HealthResponse",
    "ProblemInfoResponse",
    "ProblemListResponse",
    "ProblemRef",
    "SimulateRequest",
    "SimulateResponse",
]

"""Response models for API endpoints."""

from typing import Any, Optional

from pydantic import BaseModel, Field

from ...simulation.engine import SimEstimate


class HealthResponse(BaseModel):
    """Health check response."""

    status: str = Field(..., description="Health status")
    version: str = Field(..., description="API version")
    problems_available: int = Field(..., description="Number of canonical problems")


class ProblemListResponse(BaseModel):
    problems: list[str] = Field(..., description="Canonical problem names")
    total_count: int = Field(..., description="Total number of problems")


class ProblemInfoResponse(BaseModel):
    """A canonical problem with its safe level and regime."""

    name: str = Field(..., description="Problem name")
    description: Optional[str] = Field(default=None, description="Problem description")
    definition: dict[str, Any] = Field(..., description="Market, payout and alpha")
    w_s: Optional[float] = Field(..., description="Safe level; null when infinite")
    regime: str = Field(..., description="Regime classification")


class EvaluateResponse(BaseModel):
    phi: float = Field(..., description="Minimum probability of drawdown")
    branch: str = Field(..., description="Branch of the solution used")
    pi_star: float = Field(..., description="Optimal amount in the risky asset")
    g: Optional[float] = Field(default=None, description="Scale function; null outside the domain")
    k_of_m: float = Field(..., description="k(m)")
    w_s: Optional[float] = Field(..., description="Safe level; null when infinite")
    regime: str = Field(..., description="Regime classification")


class SimulateResponse(BaseModel):
    strategy: str = Field(..., description="Strategy label")
    estimate: SimEstimate
    execution_time: float = Field(..., description="Execution time in seconds")


class ErrorResponse(BaseModel):
    """Error response."""

    error: str = Field(..., description="Error type")
    message: str = Field(..., description="Error message")
    detail: Optional[str] = Field(default=None, description="Additional error details")

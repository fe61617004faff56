"""Request models for API endpoints."""

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ...problem_files import ProblemFile
from ...simulation.engine import SimConfig


class ProblemRef(BaseModel):
    """A canonical problem name or an inline problem definition."""

    problem_name: Optional[str] = Field(
        default=None, description="Canonical problem name", examples=["constant"]
    )
    problem: Optional[ProblemFile] = Field(
        default=None, description="Inline problem: market, payout and alpha"
    )

    @model_validator(mode="after")
    def exactly_one(self) -> "ProblemRef":
        if (self.problem_name is None) == (self.problem is None):
            raise ValueError("give exactly one of problem_name and problem")
        return self


class EvaluateRequest(ProblemRef):
    """Request model for point evaluation."""

    w: float = Field(..., description="Wealth")
    m: float = Field(..., gt=0, description="Running maximum of wealth")
    allow_outside: bool = Field(
        default=False, description="Map w < alpha*m to phi 1 and w > w_s to phi 0"
    )

    model_config = ConfigDict(
        json_schema_extra={"example": {"problem_name": "constant", "w": 1.8, "m": 2.0}}
    )


class SimulateRequest(ProblemRef):
    """Request model for a Monte Carlo estimate."""

    config: SimConfig = Field(..., description="Step, horizon, path count and seed")
    strategy: str = Field(
        default="optimal",
        description="optimal, all_safe, constant_amount[:PI] or constant_fraction:THETA",
    )
    w0: float = Field(..., gt=0, description="Initial wealth")
    m0: float = Field(..., gt=0, description="Initial running maximum")

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "problem_name": "constant",
                "config": {"dt": 0.01, "horizon": 50, "n_paths": 2000, "seed": 7},
                "strategy": "optimal",
                "w0": 1.8,
                "m0": 2.0,
            }
        }
    )

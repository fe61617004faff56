"""
Grid sweeps of the analytic quantities for plotting.

A sweep evaluates the requested outputs on the product of a wealth grid and
a running-maximum grid, keeping only points inside the problem domain.
"""

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .core.model import DrawdownProblem
from .core.policy import phi, pi_star
from .core.scale import ScaleContext
from .logging_config import get_logger
from .simulation.results import format_number

logger = get_logger(__name__)

Output = Literal["phi", "pi_star", "g", "k", "v"]
OUTPUT_ORDER: tuple[str, ...] = ("phi", "pi_star", "g", "k", "v")


class GridAxis(BaseModel):
    """``count`` equally spaced values from ``min`` to ``max``."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    lo: float = Field(alias="min")
    hi: float = Field(alias="max")
    count: int = Field(ge=2)

    @model_validator(mode="after")
    def ordered(self) -> "GridAxis":
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError("grid bounds must be finite")
        if self.hi < self.lo:
            raise ValueError(f"max ({self.hi}) must be >= min ({self.lo})")
        return self

    def values(self) -> list[float]:
        return np.linspace(self.lo, self.hi, self.count).tolist()


class SweepSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    w_grid: GridAxis
    m_grid: GridAxis
    outputs: list[Output] = Field(default_factory=lambda: list(OUTPUT_ORDER), min_length=1)

    @field_validator("outputs")
    @classmethod
    def canonical_order(cls, v: list[str]) -> list[str]:
        return [name for name in OUTPUT_ORDER if name in v]

    @property
    def columns(self) -> list[str]:
        return ["w", "m", *self.outputs]


@dataclass
class SweepResult:
    columns: list[str]
    rows: list[dict[str, float]] = field(default_factory=list)
    skipped: int = 0

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([format_number(row[c]) for c in self.columns])
        return buffer.getvalue()

    def write(self, path: Path) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as f:
            f.write(self.to_csv())


def run_sweep(
    problem: DrawdownProblem, spec: SweepSpec, ctx: Optional[ScaleContext] = None
) -> SweepResult:
    """
    Evaluate ``spec.outputs`` on the in-domain points of the grid.

    Rows are ordered w-major. Points outside the domain are dropped and
    counted in ``SweepResult.skipped``.
    """
    ctx = ctx or ScaleContext(problem)
    w_values = spec.w_grid.values()
    m_values = spec.m_grid.values()
    wanted = set(spec.outputs)

    inside = {
        (w, m): problem.in_domain(w, m) for w in w_values for m in m_values
    }

    per_m: dict[float, dict[str, object]] = {}
    for m in m_values:
        targets = [w for w in w_values if inside[(w, m)]]
        if not targets:
            continue
        cached: dict[str, object] = {}
        if "k" in wanted:
            cached["k"] = 1.0 if m >= ctx.ws else ctx.k(m)
        if "v" in wanted:
            cached["v"] = dict(zip(targets, ctx.v_profile(m, targets)))
        per_m[m] = cached

    result = SweepResult(columns=spec.columns)
    for w in w_values:
        for m in m_values:
            if not inside[(w, m)]:
                result.skipped += 1
                continue
            row: dict[str, float] = {"w": w, "m": m}
            if "phi" in wanted:
                row["phi"] = phi(ctx, w, m).value
            if "pi_star" in wanted:
                row["pi_star"] = float(pi_star(problem, w))
            if "g" in wanted:
                row["g"] = ctx.g(w, m)
            if "k" in wanted:
                row["k"] = per_m[m]["k"]  # type: ignore[assignment]
            if "v" in wanted:
                row["v"] = per_m[m]["v"][w]  # type: ignore[index]
            result.rows.append(row)

    logger.info(
        "sweep: %d points evaluated, %d outside the domain", len(result.rows), result.skipped
    )
    logger.debug("scale caches after sweep: %s", ctx.cache_sizes())
    return result

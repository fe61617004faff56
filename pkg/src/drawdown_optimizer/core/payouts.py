"""
Payout rate functions c(w).

Every payout is an immutable pydantic model tagged by ``kind`` so problem
files can name it directly. ``rate`` accepts scalars or numpy arrays and
extends c below zero wealth by its value at zero.
"""

import math
from typing import Annotated, Any, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, field_validator

ArrayLike = Union[float, np.ndarray]


def _as_output(values: np.ndarray) -> ArrayLike:
    return float(values) if values.ndim == 0 else values


class _Payout(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    def rate(self, w: ArrayLike, r: float) -> ArrayLike:
        """c(w), with c(w) = c(0) for w < 0."""
        arr = np.maximum(np.asarray(w, dtype=float), 0.0)
        return _as_output(np.asarray(self._rate(arr, r), dtype=float))

    def _rate(self, w: np.ndarray, r: float) -> np.ndarray:
        raise NotImplementedError

    def analytic_safe_level(self, r: float) -> Optional[float]:
        """Safe level when known in closed form, ``None`` when a search is needed."""
        return None

    def monotone_from(self, r: float) -> float:
        """Wealth above which c must be non-decreasing (0 unless the family says otherwise)."""
        return 0.0

    def grid_points(self) -> list[float]:
        """Extra wealth points that a validation grid must contain."""
        return []

    def label(self) -> str:
        fields = ", ".join(f"{k}={v}" for k, v in self.model_dump(exclude={"kind"}).items())
        return f"{self.kind}({fields})"  # type: ignore[attr-defined]


class Constant(_Payout):
    kind: Literal["constant"] = "constant"
    c: float = Field(ge=0)

    def _rate(self, w: np.ndarray, r: float) -> np.ndarray:
        return np.full_like(w, self.c)

    def analytic_safe_level(self, r: float) -> Optional[float]:
        return self.c / r if self.c > 0 else None


class Proportional(_Payout):
    kind: Literal["proportional"] = "proportional"
    kappa: float = Field(ge=0)

    def _rate(self, w: np.ndarray, r: float) -> np.ndarray:
        return self.kappa * w

    def analytic_safe_level(self, r: float) -> Optional[float]:
        return math.inf if self.kappa > r else None


class Affine(_Payout):
    """c(w) = a + b*w."""

    kind: Literal["affine"] = "affine"
    a: float = Field(ge=0)
    b: float = Field(ge=0)

    def _rate(self, w: np.ndarray, r: float) -> np.ndarray:
        return self.a + self.b * w

    def analytic_safe_level(self, r: float) -> Optional[float]:
        if self.a > 0 and self.b < r:
            return self.a / (r - self.b)
        if self.b > r or (self.a > 0 and self.b == r):
            return math.inf
        return None


class QuadraticSafe(_Payout):
    """c(w) = rw + b(ws - w)^2 up to ws, r*ws above."""

    kind: Literal["quadratic_safe"] = "quadratic_safe"
    b: float = Field(gt=0)
    ws: float = Field(gt=0)

    def _rate(self, w: np.ndarray, r: float) -> np.ndarray:
        gap = np.maximum(self.ws - w, 0.0)
        return np.where(w <= self.ws, r * w + self.b * gap**2, r * self.ws)

    def analytic_safe_level(self, r: float) -> Optional[float]:
        return self.ws

    def monotone_from(self, r: float) -> float:
        return max(0.0, self.ws - r / (2.0 * self.b))

    def grid_points(self) -> list[float]:
        return [self.ws]


class PowerSafe(_Payout):
    """c(w) = rw + b(ws - w)^power up to ws, r*ws above."""

    kind: Literal["power_safe"] = "power_safe"
    b: float = Field(gt=0)
    ws: float = Field(gt=0)
    power: float = Field(gt=0)

    def _rate(self, w: np.ndarray, r: float) -> np.ndarray:
        gap = np.maximum(self.ws - w, 0.0)
        return np.where(w <= self.ws, r * w + self.b * gap**self.power, r * self.ws)

    def analytic_safe_level(self, r: float) -> Optional[float]:
        return self.ws

    def monotone_from(self, r: float) -> float:
        # c'(w) = r - power*b*(ws - w)^(power - 1)
        if self.power <= 1.0:
            return 0.0
        reach = (r / (self.power * self.b)) ** (1.0 / (self.power - 1.0))
        return max(0.0, self.ws - reach)

    def grid_points(self) -> list[float]:
        return [self.ws]


class Tabulated(_Payout):
    """Piecewise-linear through ``knots``, clamped to the end values outside them."""

    kind: Literal["tabulated"] = "tabulated"
    knots: list[tuple[float, float]] = Field(min_length=2)

    @field_validator("knots")
    @classmethod
    def knots_sorted(cls, v: list[tuple[float, float]]) -> list[tuple[float, float]]:
        xs = [x for x, _ in v]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("knot wealth values must be strictly increasing")
        if not all(math.isfinite(x) and math.isfinite(y) for x, y in v):
            raise ValueError("knots must be finite")
        return v

    def _rate(self, w: np.ndarray, r: float) -> np.ndarray:
        xs = np.array([x for x, _ in self.knots])
        ys = np.array([y for _, y in self.knots])
        return np.interp(w, xs, ys)

    def grid_points(self) -> list[float]:
        return [x for x, _ in self.knots if x > 0]


PayoutSpec = Annotated[
    Union[Constant, Proportional, Affine, QuadraticSafe, PowerSafe, Tabulated],
    Field(discriminator="kind"),
]

PAYOUT_KINDS = ("constant", "proportional", "affine", "quadratic_safe", "power_safe", "tabulated")


def payout_from_dict(data: dict[str, Any]) -> Any:
    """Build a payout model from a ``{"kind": ..., ...}`` mapping."""
    return TypeAdapter(PayoutSpec).validate_python(data)

"""
Feedback investment strategies for the simulator.

Each strategy maps arrays of (wealth, running maximum) to the amount held in
the risky asset.
"""

from typing import Annotated, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, TypeAdapter

from ..core.model import DrawdownProblem
from ..core.policy import pi_star, pi_star_extended
from ..exceptions import ConfigError


class _Strategy(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    def amount(self, problem: DrawdownProblem, w: np.ndarray, m: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @property
    def label(self) -> str:
        return self.kind  # type: ignore[attr-defined]


class Optimal(_Strategy):
    kind: Literal["optimal"] = "optimal"

    def amount(self, problem: DrawdownProblem, w: np.ndarray, m: np.ndarray) -> np.ndarray:
        return np.asarray(pi_star_extended(problem, w, m), dtype=float)


class ConstantAmount(_Strategy):
    kind: Literal["constant_amount"] = "constant_amount"
    pi: float

    def amount(self, problem: DrawdownProblem, w: np.ndarray, m: np.ndarray) -> np.ndarray:
        return np.full_like(w, self.pi)

    @property
    def label(self) -> str:
        return f"constant_amount:{self.pi!r}"


class ConstantFraction(_Strategy):
    kind: Literal["constant_fraction"] = "constant_fraction"
    theta: float = Field(ge=0)

    def amount(self, problem: DrawdownProblem, w: np.ndarray, m: np.ndarray) -> np.ndarray:
        return self.theta * w

    @property
    def label(self) -> str:
        return f"constant_fraction:{self.theta!r}"


class AllSafe(_Strategy):
    kind: Literal["all_safe"] = "all_safe"

    def amount(self, problem: DrawdownProblem, w: np.ndarray, m: np.ndarray) -> np.ndarray:
        return np.zeros_like(w)


Strategy = Annotated[
    Union[Optimal, ConstantAmount, ConstantFraction, AllSafe],
    Field(discriminator="kind"),
]

STRATEGY_NAMES = ("optimal", "constant_amount", "constant_fraction", "all_safe")


def parse_strategy(
    text: str, problem: Optional[DrawdownProblem] = None, w0: Optional[float] = None
) -> Union[Optimal, ConstantAmount, ConstantFraction, AllSafe]:
    """
    Parse ``name`` or ``name:value``.

    ``constant_amount`` without a value freezes the optimal amount at ``w0``.

    Examples:
        optimal, all_safe, constant_amount:1.0, constant_fraction:0.5
    """
    name, _, raw = text.strip().partition(":")
    name = name.replace("-", "_").lower()
    data: dict[str, object] = {"kind": name}
    try:
        if name == "constant_amount":
            if raw:
                data["pi"] = float(raw)
            elif problem is not None and w0 is not None:
                data["pi"] = float(pi_star(problem, min(w0, problem.ws)))
            else:
                raise ConfigError("constant_amount needs a value or a starting wealth")
        elif name == "constant_fraction":
            if not raw:
                raise ConfigError("constant_fraction needs a value, e.g. constant_fraction:0.5")
            data["theta"] = float(raw)
        elif raw:
            raise ConfigError(f"strategy {name!r} takes no value")
        return TypeAdapter(Strategy).validate_python(data)
    except ValueError as e:
        if isinstance(e, ConfigError):
            raise
        names = ", ".join(STRATEGY_NAMES)
        raise ConfigError(f"invalid strategy {text!r} (known: {names}): {e}") from e

"""Analytic core: payouts, problem model, scale functions, policy and oracles."""

from .model import (
    DrawdownProblem,
    FiniteSafe,
    InfiniteSafeCertainDrawdown,
    InfiniteSafeOther,
    MarketParams,
    StatePoint,
    build_problem,
    classify_regime,
    excess,
    safe_level,
    validate,
)
from .payouts import Affine, Constant, PowerSafe, Proportional, QuadraticSafe, Tabulated
from .policy import PhiValue, PolicyEval, hjb_residual, phi, pi_star, pi_star_extended
from .scale import FellerReport, ScaleContext

__all__ = [
    "Affine",
    "Constant",
    "DrawdownProblem",
    "FellerReport",
    "FiniteSafe",
    "InfiniteSafeCertainDrawdown",
    "InfiniteSafeOther",
    "MarketParams",
    "PhiValue",
    "PolicyEval",
    "PowerSafe",
    "Proportional",
    "QuadraticSafe",
    "ScaleContext",
    "StatePoint",
    "Tabulated",
    "build_problem",
    "classify_regime",
    "excess",
    "hjb_residual",
    "phi",
    "pi_star",
    "pi_star_extended",
    "safe_level",
    "validate",
]

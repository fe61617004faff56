"""Monte Carlo simulation of the controlled wealth process."""

from .engine import (
    SimConfig,
    SimEstimate,
    StrategyResult,
    compare_strategies,
    estimate_drawdown,
    step,
)
from .strategies import (
    AllSafe,
    ConstantAmount,
    ConstantFraction,
    Optimal,
    Strategy,
    parse_strategy,
)

__all__ = [
    "AllSafe",
    "ConstantAmount",
    "ConstantFraction",
    "Optimal",
    "SimConfig",
    "SimEstimate",
    "Strategy",
    "StrategyResult",
    "compare_strategies",
    "estimate_drawdown",
    "parse_strategy",
    "step",
]

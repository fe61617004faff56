"""
drawdown-optimizer: Minimize the probability of drawdown.

Computes the minimum probability that wealth falls to a fixed fraction of
its running maximum when an individual consumes at a wealth-dependent rate
and invests in a riskless and a risky asset, together with the optimal
investment strategy, Feller diagnostics at the safe level and Monte Carlo
checks of both.
"""

__version__ = "0.1.0"

from .core.model import DrawdownProblem, MarketParams, build_problem
from .core.policy import phi, pi_star
from .core.scale import ScaleContext
from .problem_files import load_problem
from .simulation.engine import SimConfig, estimate_drawdown

__all__ = [
    "DrawdownProblem",
    "MarketParams",
    "ScaleContext",
    "SimConfig",
    "build_problem",
    "estimate_drawdown",
    "load_problem",
    "phi",
    "pi_star",
]

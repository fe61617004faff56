"""Shared fixtures and the session-wide closed-form gate."""

import numpy as np
import pytest

from drawdown_optimizer.core.model import MarketParams, build_problem
from drawdown_optimizer.core.oracle import g_constant_closed
from drawdown_optimizer.core.payouts import Constant, Proportional, QuadraticSafe
from drawdown_optimizer.core.scale import ScaleContext
from drawdown_optimizer.utils.numerics import Tolerance


@pytest.fixture(scope="session", autouse=True)
def closed_form_gate():
    """
    Cross-check the constant-payout closed form against a midpoint sum.

    Every oracle comparison depends on this formula, so a mismatch stops the
    session before anything else runs.
    """
    market = MarketParams(r=0.02, mu=0.08, sigma=0.2)
    c, alpha, m, w = 0.05, 0.5, 2.0, 1.5
    floor = alpha * m
    panels = 1_000_000
    h = (w - floor) / panels
    y = floor + h * (np.arange(panels) + 0.5)
    power = market.delta / market.r
    midpoint = float(np.sum(((c - market.r * y) / (c - market.r * floor)) ** power) * h)
    closed = g_constant_closed(c, market, alpha, m, w)
    if abs(closed - midpoint) > 1e-9 * abs(midpoint):
        pytest.exit(f"closed-form g {closed!r} disagrees with midpoint sum {midpoint!r}")


@pytest.fixture(scope="session")
def market() -> MarketParams:
    """r = 0.02, mu = 0.08, sigma = 0.2, so delta = 0.045."""
    return MarketParams(r=0.02, mu=0.08, sigma=0.2)


@pytest.fixture(scope="session")
def tight() -> Tolerance:
    return Tolerance(abs_tol=1e-12, rel_tol=1e-12)


@pytest.fixture(scope="session")
def constant_problem(market):
    """Constant payout c = 0.05, alpha = 0.5; w_s = 2.5."""
    return build_problem(market, Constant(c=0.05), 0.5)


@pytest.fixture(scope="session")
def constant_low_problem(market):
    return build_problem(market, Constant(c=0.04), 0.5)


@pytest.fixture(scope="session")
def proportional_problem(market):
    """kappa = 0.03 > r: drawdown is certain."""
    return build_problem(market, Proportional(kappa=0.03), 0.5)


@pytest.fixture(scope="session")
def quadratic_problem(market):
    """c(w) = rw + 0.004 (2.5 - w)^2 below w_s = 2.5."""
    return build_problem(market, QuadraticSafe(b=0.004, ws=2.5), 0.5)


@pytest.fixture
def constant_ctx(constant_problem, tight) -> ScaleContext:
    return ScaleContext(constant_problem, tight)

"""Unit tests for the independent reference values."""

import math

import pytest

from drawdown_optimizer.core.oracle import (
    bvp_residual_scan,
    g_constant_closed,
    g_ode_oracle,
    g_ode_states,
    g_quadratic_closed,
    v_quadratic_closed,
    v_quadratic_lower_bound,
)
from drawdown_optimizer.core.scale import ScaleContext
from drawdown_optimizer.exceptions import DomainError

SCAN_GRID = [(1.0, 1.6), (1.3, 1.6), (1.2, 2.0), (1.7, 2.0)]


@pytest.fixture(scope="module")
def quadratic_ctx(quadratic_problem, tight):
    return ScaleContext(quadratic_problem, tight)


class TestConstantClosedForm:
    def test_reference_value(self, market):
        assert g_constant_closed(0.05, market, 0.5, 2.0, 1.5) == pytest.approx(0.33797, abs=1e-5)

    def test_zero_on_floor(self, market):
        assert g_constant_closed(0.05, market, 0.5, 2.0, 1.0) == 0.0

    def test_full_width_at_safe_level(self, market):
        # A / (r (beta + 1)) with A = 0.03 and beta + 1 = 3.25
        assert g_constant_closed(0.05, market, 0.5, 2.0, 2.5) == pytest.approx(0.03 / 0.065)

    def test_domain(self, market):
        with pytest.raises(DomainError):
            g_constant_closed(0.05, market, 0.5, 2.0, 0.9)
        with pytest.raises(DomainError):
            g_constant_closed(0.05, market, 0.5, 6.0, 3.0)


class TestQuadraticClosedForm:
    def test_agrees_with_ode(self, quadratic_problem, market):
        targets = [1.2, 1.6, 2.0, 2.2]
        for w, expected in zip(targets, g_ode_oracle(quadratic_problem, 2.0, targets)):
            assert g_quadratic_closed(0.004, 2.5, market, 0.5, 2.0, w) == pytest.approx(
                expected, rel=1e-7
            )

    def test_guard(self, market):
        # ws - r/(2b) = 2.4 with b = 0.1
        with pytest.raises(DomainError, match="ws - r/\\(2b\\)"):
            g_quadratic_closed(0.1, 2.5, market, 0.5, 2.0, 1.5)

    def test_feller_function(self, quadratic_ctx, market):
        for w in (1.5, 2.2, 2.45):
            assert quadratic_ctx.v(w, 2.0) == pytest.approx(
                v_quadratic_closed(0.004, 2.5, market, 0.5, 2.0, w), rel=1e-6
            )

    def test_feller_function_at_safe_level(self, market):
        assert v_quadratic_closed(0.004, 2.5, market, 0.5, 2.0, 2.5) == math.inf

    def test_lower_bound(self, market):
        for w in (1.5, 2.2, 2.45, 2.499):
            closed = v_quadratic_closed(0.004, 2.5, market, 0.5, 2.0, w)
            assert v_quadratic_lower_bound(0.004, 2.5, market, 0.5, 2.0, w) <= closed
        assert v_quadratic_lower_bound(0.004, 2.5, market, 0.5, 2.0, 2.4999) > 1e3

    def test_lower_bound_has_no_constant_factor(self, market):
        # with exp(delta / (b (ws - alpha m))) = exp(7.5) in front the ratio would be ~1800
        w = 2.4999
        closed = v_quadratic_closed(0.004, 2.5, market, 0.5, 2.0, w)
        bound = v_quadratic_lower_bound(0.004, 2.5, market, 0.5, 2.0, w)
        assert bound / closed == pytest.approx(1.0, rel=1e-3)


class TestODEOracle:
    def test_initial_state(self, constant_problem):
        assert g_ode_states(constant_problem, 2.0, [1.0]) == [(0.0, 1.0)]

    def test_targets_in_any_order(self, constant_problem, market):
        targets = [2.2, 1.4, 1.8]
        for w, g in zip(targets, g_ode_oracle(constant_problem, 2.0, targets)):
            assert g == pytest.approx(g_constant_closed(0.05, market, 0.5, 2.0, w), rel=1e-9)

    def test_slope_matches_derivative(self, constant_problem, constant_ctx):
        [(_, slope)] = g_ode_states(constant_problem, 2.0, [1.7])
        assert slope == pytest.approx(constant_ctx.g_w(1.7, 2.0), rel=1e-9)

    def test_rejects_targets_outside(self, constant_problem):
        with pytest.raises(DomainError):
            g_ode_oracle(constant_problem, 2.0, [0.9])
        with pytest.raises(DomainError):
            g_ode_oracle(constant_problem, 2.0, [2.5])


class TestBVPScan:
    def test_bounded_maximum_solution(self, constant_ctx):
        assert bvp_residual_scan(constant_ctx, 2.4, SCAN_GRID) < 1e-3

    def test_perturbed_candidate_is_rejected(self, constant_ctx):
        exact = bvp_residual_scan(constant_ctx, 2.4, SCAN_GRID)
        perturbed = bvp_residual_scan(
            constant_ctx,
            2.4,
            SCAN_GRID,
            candidate=lambda w, m: constant_ctx._h_raw(w, m, 2.4, rate_scale=1.01),
        )
        assert perturbed > 1e-3
        assert perturbed > exact

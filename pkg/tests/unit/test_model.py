"""Unit tests for payouts, validation, safe levels and regimes."""

import logging
import math

import numpy as np
import pytest
from pydantic import ValidationError

from drawdown_optimizer.core.model import (
    DrawdownProblem,
    FiniteSafe,
    InfiniteSafeCertainDrawdown,
    InfiniteSafeOther,
    MarketParams,
    StatePoint,
    build_problem,
    classify_regime,
    safe_level,
    validate,
)
from drawdown_optimizer.core.payouts import (
    Affine,
    Constant,
    PowerSafe,
    Proportional,
    QuadraticSafe,
    Tabulated,
    payout_from_dict,
)
from drawdown_optimizer.exceptions import (
    AmbiguousCrossingError,
    DomainError,
    PayoutValidationError,
)
from drawdown_optimizer.utils.numerics import Tolerance

DECREASING = Tabulated(knots=[(0.0, 0.05), (1.0, 0.04), (2.0, 0.03)])
NEGATIVE_START = Tabulated(knots=[(0.0, -0.01), (1.0, 0.05)])
CROSSES_UPWARD = Tabulated(knots=[(0.0, 0.0), (1.0, 0.0), (2.0, 0.1), (1e7, 1e6)])
SLOWLY_DECAYING_EXCESS = Tabulated(knots=[(1.0, 1.0), (1e6, 20000.5)])


class TestMarketParams:
    def test_delta(self, market):
        assert market.delta == pytest.approx(0.045)

    def test_mu_must_exceed_r(self):
        with pytest.raises(ValidationError, match="mu must exceed r"):
            MarketParams(r=0.05, mu=0.05, sigma=0.2)

    def test_rejects_unknown_fields(self):
        with pytest.raises(ValidationError):
            MarketParams(r=0.02, mu=0.08, sigma=0.2, rho=0.1)


class TestPayouts:
    def test_constant_scalar_and_array(self):
        payout = Constant(c=0.05)
        assert payout.rate(1.0, 0.02) == 0.05
        assert isinstance(payout.rate(1.0, 0.02), float)
        np.testing.assert_allclose(payout.rate(np.array([0.5, 2.0]), 0.02), [0.05, 0.05])

    def test_negative_wealth_uses_value_at_zero(self):
        assert Affine(a=0.03, b=0.01).rate(-5.0, 0.02) == pytest.approx(0.03)

    def test_quadratic_continues_flat_above_ws(self):
        payout = QuadraticSafe(b=0.004, ws=2.5)
        assert payout.rate(2.0, 0.02) == pytest.approx(0.04 + 0.004 * 0.25)
        assert payout.rate(4.0, 0.02) == pytest.approx(0.05)

    def test_power_two_matches_quadratic(self):
        quad = QuadraticSafe(b=0.004, ws=2.5)
        power = PowerSafe(b=0.004, ws=2.5, power=2.0)
        w = np.linspace(0.1, 3.0, 7)
        np.testing.assert_allclose(power.rate(w, 0.02), quad.rate(w, 0.02))
        assert power.monotone_from(0.02) == pytest.approx(quad.monotone_from(0.02))

    def test_tabulated_interpolates_and_clamps(self):
        payout = Tabulated(knots=[(1.0, 0.02), (3.0, 0.06)])
        assert payout.rate(2.0, 0.02) == pytest.approx(0.04)
        assert payout.rate(0.5, 0.02) == pytest.approx(0.02)
        assert payout.rate(10.0, 0.02) == pytest.approx(0.06)

    def test_tabulated_knots_must_increase(self):
        with pytest.raises(ValidationError, match="strictly increasing"):
            Tabulated(knots=[(2.0, 0.01), (1.0, 0.02)])

    def test_payout_from_dict(self):
        payout = payout_from_dict({"kind": "affine", "a": 0.03, "b": 0.01})
        assert isinstance(payout, Affine)
        assert payout.label() == "affine(a=0.03, b=0.01)"

    def test_payout_from_dict_unknown_kind(self):
        with pytest.raises(ValidationError):
            payout_from_dict({"kind": "lottery", "c": 1.0})


class TestValidate:
    def test_canonical_payouts_are_admissible(self, market):
        for payout in (
            Constant(c=0.05),
            Proportional(kappa=0.03),
            Affine(a=0.03, b=0.01),
            QuadraticSafe(b=0.004, ws=2.5),
            SLOWLY_DECAYING_EXCESS,
        ):
            assert validate(payout, market) == [], payout.label()

    def test_decreasing(self, market):
        kinds = [v.kind for v in validate(DECREASING, market)]
        assert kinds == ["decreasing"]

    def test_negative_and_multiple_crossings(self, market):
        kinds = {v.kind for v in validate(NEGATIVE_START, market)}
        assert {"negative", "multiple_crossings"} <= kinds

    def test_wrong_crossing_direction(self, market):
        kinds = [v.kind for v in validate(CROSSES_UPWARD, market)]
        assert kinds == ["wrong_crossing_direction"]

    def test_no_safe_region(self, market):
        violations = validate(Constant(c=0.0), market)
        assert [v.kind for v in violations] == ["no_safe_region"]
        assert "no_safe_region" in str(violations[0])

    def test_grid_size_floor(self, market):
        with pytest.raises(ValueError):
            validate(Constant(c=0.05), market, grid_size=4)


class TestSafeLevel:
    @pytest.mark.parametrize(
        "payout, expected",
        [
            (Constant(c=0.05), 2.5),
            (Affine(a=0.03, b=0.01), 3.0),
            (QuadraticSafe(b=0.004, ws=2.5), 2.5),
            (Proportional(kappa=0.03), math.inf),
        ],
    )
    def test_closed_form_levels(self, market, payout, expected):
        assert safe_level(payout, market) == pytest.approx(expected)

    def test_tabulated_level_by_search(self, market):
        payout = Tabulated(knots=[(0.0, 0.03), (1.0, 0.04), (2.0, 0.055), (4.0, 0.07)])
        assert safe_level(payout, market) == pytest.approx(3.2, abs=1e-8)

    @pytest.mark.parametrize("grid_size", [32, 128, 512])
    def test_stable_under_grid_refinement(self, market, grid_size):
        payout = Tabulated(knots=[(0.0, 0.03), (1.0, 0.04), (2.0, 0.055), (4.0, 0.07)])
        tol = Tolerance()
        coarse = safe_level(payout, market, tol, grid_size=grid_size)
        fine = safe_level(payout, market, tol, grid_size=2 * grid_size)
        assert abs(fine - coarse) <= tol.abs_tol

    def test_ambiguous_crossing(self, market):
        with pytest.raises(AmbiguousCrossingError):
            safe_level(NEGATIVE_START, market)


class TestClassifyRegime:
    def test_finite(self, market):
        regime = classify_regime(Constant(c=0.05), market)
        assert isinstance(regime, FiniteSafe)
        assert regime.ws == pytest.approx(2.5)

    def test_proportional_is_certain_drawdown(self, market):
        regime = classify_regime(Proportional(kappa=0.03), market)
        assert isinstance(regime, InfiniteSafeCertainDrawdown)
        assert regime.L > 0

    def test_constant_excess_is_certain_drawdown(self, market):
        regime = classify_regime(Affine(a=0.01, b=0.02), market)
        assert isinstance(regime, InfiniteSafeCertainDrawdown)
        assert regime.L == pytest.approx(0.005)

    def test_decaying_excess_is_other(self, market):
        assert isinstance(classify_regime(SLOWLY_DECAYING_EXCESS, market), InfiniteSafeOther)


class TestBuildProblem:
    def test_strict_rejects_violations(self, market):
        with pytest.raises(PayoutValidationError) as exc_info:
            build_problem(market, DECREASING, 0.5)
        assert exc_info.value.violations[0].kind == "decreasing"

    def test_lenient_keeps_going(self, market, caplog):
        caplog.set_level(logging.WARNING, logger="drawdown_optimizer")
        problem = build_problem(market, DECREASING, 0.5, strict=False)
        assert problem.ws == pytest.approx(0.05 / 0.03, rel=1e-9)
        assert "payout violation" in caplog.text

    def test_alpha_range(self, market):
        with pytest.raises(ValidationError):
            build_problem(market, Constant(c=0.05), 1.0)

    def test_problem_properties(self, constant_problem, proportional_problem):
        assert isinstance(constant_problem, DrawdownProblem)
        assert constant_problem.ws == pytest.approx(2.5)
        assert constant_problem.excess(1.0) == pytest.approx(0.03)
        assert proportional_problem.ws == math.inf


class TestDomain:
    @pytest.mark.parametrize(
        "w, m, message",
        [
            (0.9, 2.0, "alpha\\*m <= w"),
            (2.1, 2.0, "w <= m"),
            (2.6, 3.0, "w <= w_s"),
            (0.5, 0.0, "m > 0"),
            (math.nan, 2.0, "finite"),
        ],
    )
    def test_check_point_names_constraint(self, constant_problem, w, m, message):
        with pytest.raises(DomainError, match=message):
            constant_problem.check_point(w, m)

    def test_in_domain(self, constant_problem):
        assert constant_problem.in_domain(1.5, 2.0)
        assert constant_problem.in_domain(2.5, 3.0)
        assert not constant_problem.in_domain(2.6, 3.0)

    def test_monotone_guard(self, market):
        problem = build_problem(market, QuadraticSafe(b=0.1, ws=2.5), 0.5)
        with pytest.raises(DomainError, match="alpha\\*m >= "):
            problem.check_point(2.2, 4.0)
        problem.check_point(2.45, 4.9)

    def test_state_point(self, constant_problem):
        assert StatePoint(1.5, 2.0).check(constant_problem) == StatePoint(1.5, 2.0)
        with pytest.raises(DomainError):
            StatePoint(3.0, 2.0).check(constant_problem)

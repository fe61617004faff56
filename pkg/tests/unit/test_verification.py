"""Tests for the verification suite."""

import pytest

from drawdown_optimizer.exceptions import DomainError, ProblemFileError
from drawdown_optimizer.verification import CheckResult, SuiteReport, run_verification
from drawdown_optimizer.verification.suite import _guarded, check_monotone_in_m

CORRUPTED = """\
name: corrupted
market: {r: 0.02, mu: 0.08, sigma: 0.2}
payout:
  kind: tabulated
  knots: [[0.0, 0.05], [1.0, 0.04], [2.0, 0.03]]
alpha: 0.5
"""


class TestReport:
    def test_lines(self):
        assert CheckResult(name="a", passed=True).line() == "PASS  a"
        assert CheckResult(name="b", passed=False, detail="x").line() == "FAIL  b  (x)"
        assert CheckResult(name="c", passed=True, skipped=True).line() == "SKIP  c"

    def test_render_counts_failures(self):
        report = SuiteReport(
            checks=[
                CheckResult(name="a", passed=True),
                CheckResult(name="b", passed=False),
                CheckResult(name="c", passed=True, skipped=True),
            ]
        )
        assert not report.passed
        assert report.render().endswith("3 checks, 1 failed\n")

    def test_monotonicity_is_reported_not_asserted(self, constant_ctx):
        result = check_monotone_in_m("constant", constant_ctx)
        assert result.passed
        k_part, phi_part = result.detail.split(", ")
        assert k_part == "k drops 0/7"
        assert phi_part.endswith("drops 0/7")

    def test_guarded_turns_errors_into_failures(self):
        def boom() -> CheckResult:
            raise DomainError("outside")

        result = _guarded("boom", boom)
        assert not result.passed
        assert "DomainError: outside" in result.detail


class TestRunVerification:
    def test_constant_fast(self):
        report = run_verification("constant", fast=True)
        assert report.passed, report.render()
        names = [c.name for c in report.checks]
        assert names[0] == "constant: payout validation"
        assert "constant: Feller test" in names
        assert "constant: monotonicity in m" in names
        assert report.checks[-1].skipped

    def test_quadratic_fast(self):
        report = run_verification("quadratic_safe", fast=True)
        assert report.passed, report.render()

    def test_proportional_fast(self):
        report = run_verification("proportional", fast=True)
        assert report.passed, report.render()

    def test_corrupted_payout_fails(self, tmp_path):
        path = tmp_path / "corrupted.yaml"
        path.write_text(CORRUPTED)
        report = run_verification(str(path), fast=True)
        assert not report.passed
        assert report.checks[0].name == "corrupted: payout validation"
        assert "decreasing" in report.checks[0].detail

    def test_unknown_problem(self):
        with pytest.raises(ProblemFileError):
            run_verification("nope", fast=True)


@pytest.mark.slow
def test_full_suite():
    report = run_verification()
    assert report.passed, report.render()

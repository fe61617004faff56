"""
End-to-end checks run by ``drawdown-optimizer verify``.

Every check returns a CheckResult; numerical failures inside a check are
reported as a failed check rather than raised, so one bad quantity does not
hide the others.
"""

import math
from typing import Callable, Optional

import numpy as np
from pydantic import BaseModel

from ..config import get_settings
from ..core.model import DrawdownProblem, InfiniteSafeCertainDrawdown, validate
from ..core.oracle import (
    g_constant_closed,
    g_ode_oracle,
    g_quadratic_closed,
    v_quadratic_lower_bound,
)
from ..core.payouts import Constant, QuadraticSafe
from ..core.policy import hjb_residual, phi, pi_star, smooth_pasting
from ..core.scale import ScaleContext
from ..exceptions import DrawdownError
from ..logging_config import get_logger
from ..problem_files import ProblemFile, load_problem_file
from ..simulation.engine import SimConfig, compare_strategies, estimate_drawdown
from ..simulation.strategies import AllSafe, ConstantAmount, ConstantFraction, Optimal
from ..utils.numerics import Tolerance

logger = get_logger(__name__)

ORACLE_REL_TOL = 1e-7
PASTING_TOL = 1e-4
HJB_TOL = 1e-3
CONTINUITY_TOL = 1e-5
COMPARISON_SLACK = 1e-8
FELLER_LARGE = 1e3
# Euler barrier-crossing bias at the verification step size
MC_ALLOWANCE = 0.015
MC_EPS_SAFE = 0.05
CERTAINTY_HORIZON = 500.0

CANONICAL = ("constant", "constant_low", "proportional", "quadratic_safe", "affine", "tabulated")


class CheckResult(BaseModel):
    name: str
    passed: bool
    detail: str = ""
    skipped: bool = False

    def line(self) -> str:
        status = "SKIP" if self.skipped else ("PASS" if self.passed else "FAIL")
        return f"{status}  {self.name}" + (f"  ({self.detail})" if self.detail else "")


class SuiteReport(BaseModel):
    checks: list[CheckResult]

    @property
    def passed(self) -> bool:
        return all(c.passed or c.skipped for c in self.checks)

    def render(self) -> str:
        lines = [c.line() for c in self.checks]
        failed = sum(1 for c in self.checks if not (c.passed or c.skipped))
        lines.append(f"{len(self.checks)} checks, {failed} failed")
        return "\n".join(lines) + "\n"


def _guarded(name: str, check: Callable[[], CheckResult]) -> CheckResult:
    try:
        return check()
    except DrawdownError as e:
        logger.debug("check %s raised %s", name, type(e).__name__)
        return CheckResult(name=name, passed=False, detail=f"{type(e).__name__}: {e}")


def _rel_err(a: float, b: float) -> float:
    return abs(a - b) / abs(b) if b else abs(a)


def _context(problem: DrawdownProblem) -> ScaleContext:
    settings = get_settings()
    return ScaleContext(problem, Tolerance(1e-12, 1e-12, settings.max_subdivisions))


def _probe_maxima(problem: DrawdownProblem) -> list[float]:
    if math.isfinite(problem.ws):
        return [0.6 * problem.ws, 0.8 * problem.ws, 0.96 * problem.ws]
    return [1.0, 2.0, 4.0]


# ----------------------------------------------------------------------
# individual checks


def check_validation(label: str, document: ProblemFile) -> tuple[CheckResult, Optional[DrawdownProblem]]:
    name = f"{label}: payout validation"
    violations = validate(document.payout, document.market)
    if violations:
        detail = "; ".join(str(v) for v in violations[:3])
        return CheckResult(name=name, passed=False, detail=detail), None
    try:
        problem = document.to_problem(strict=True)
    except DrawdownError as e:
        return CheckResult(name=name, passed=False, detail=str(e)), None
    return CheckResult(name=name, passed=True, detail=f"regime {problem.regime.kind}"), problem


def check_oracle_agreement(label: str, ctx: ScaleContext, points: int = 50) -> CheckResult:
    """Quadrature g against the ODE oracle and any closed form."""
    problem = ctx.problem
    payout = problem.payout
    worst = 0.0
    for m in _probe_maxima(problem):
        floor = problem.alpha * m
        if not problem.in_domain(floor, m):
            continue
        top = problem.ws if math.isfinite(problem.ws) else 4.0 * m
        grid = np.linspace(floor, top, points, endpoint=False).tolist()
        quad = [ctx.g(w, m) for w in grid]
        references = [g_ode_oracle(problem, m, grid)]
        if isinstance(payout, Constant):
            references.append(
                [g_constant_closed(payout.c, problem.market, problem.alpha, m, w) for w in grid]
            )
        elif isinstance(payout, QuadraticSafe):
            references.append(
                [
                    g_quadratic_closed(payout.b, payout.ws, problem.market, problem.alpha, m, w)
                    for w in grid
                ]
            )
        for ref in references:
            worst = max(worst, max(_rel_err(a, b) for a, b in zip(quad, ref)))
    return CheckResult(
        name=f"{label}: g oracle agreement",
        passed=worst <= ORACLE_REL_TOL,
        detail=f"max rel err {worst:.3g}",
    )


def check_boundaries(label: str, ctx: ScaleContext) -> CheckResult:
    problem = ctx.problem
    ws = problem.ws
    maxima = np.linspace(0.5 * ws, 1.5 * ws, 10) if math.isfinite(ws) else np.linspace(1, 5, 10)
    bad = []
    for m in maxima.tolist():
        floor = problem.alpha * m
        if not problem.in_domain(floor, m):
            continue
        if phi(ctx, floor, m).value != 1.0:
            bad.append(f"phi(alpha*m, {m:.4g}) != 1")
        if m >= ws and phi(ctx, ws, m).value != 0.0:
            bad.append(f"phi(w_s, {m:.4g}) != 0")
    return CheckResult(name=f"{label}: boundary values", passed=not bad, detail="; ".join(bad[:3]))


def check_smooth_pasting(label: str, ctx: ScaleContext) -> CheckResult:
    problem = ctx.problem
    ws = problem.ws
    maxima = np.linspace(0.5 * ws, 0.95 * ws, 10) if math.isfinite(ws) else np.linspace(1, 5, 10)
    worst = 0.0
    for m in maxima.tolist():
        if problem.in_domain(problem.alpha * m, m):
            worst = max(worst, abs(smooth_pasting(ctx, m)))
    return CheckResult(
        name=f"{label}: smooth pasting",
        passed=worst <= PASTING_TOL,
        detail=f"max |d phi/dm| {worst:.3g}",
    )


def _hjb_worst(ctx: ScaleContext, points: list[tuple[float, float, float]], scale: float) -> float:
    return max(abs(hjb_residual(ctx, w, m, scale * width)) for w, m, width in points)


def check_hjb(label: str, ctx: ScaleContext, n_w: int = 30, n_m: int = 10) -> CheckResult:
    """Interior HJB residual of phi on an n_w x n_m grid, with one step halving."""
    problem = ctx.problem
    ws = problem.ws
    maxima = np.linspace(0.5 * ws, 1.2 * ws, n_m) if math.isfinite(ws) else np.linspace(1, 5, n_m)
    points = []
    for m in maxima.tolist():
        floor = problem.alpha * m
        if not problem.in_domain(floor, m):
            continue
        top = min(m, ws)
        width = top - floor
        for i in range(1, n_w + 1):
            points.append((floor + width * i / (n_w + 1), m, width))
    if not points:
        return CheckResult(name=f"{label}: HJB residual", passed=True, skipped=True)
    coarse = _hjb_worst(ctx, points, 1e-4)
    fine = _hjb_worst(ctx, points, 5e-5)
    return CheckResult(
        name=f"{label}: HJB residual",
        passed=coarse <= HJB_TOL,
        detail=f"max residual {coarse:.3g}, halved step {fine:.3g}",
    )


def check_continuity(label: str, ctx: ScaleContext, count: int = 10) -> CheckResult:
    """phi on both sides of m = w_s."""
    problem = ctx.problem
    ws = problem.ws
    eps = 1e-6 * ws
    lo_m, hi_m = ws - eps, ws + eps
    worst = 0.0
    for w in np.linspace(problem.alpha * hi_m, lo_m, count).tolist():
        worst = max(worst, abs(phi(ctx, w, lo_m).value - phi(ctx, w, hi_m).value))
    return CheckResult(
        name=f"{label}: continuity at m = w_s",
        passed=worst <= CONTINUITY_TOL,
        detail=f"max jump {worst:.3g}",
    )


def check_monotone_in_m(label: str, ctx: ScaleContext, count: int = 8) -> CheckResult:
    """
    Report whether k and phi(w, .) are non-decreasing in m.

    Neither property is established in general, so drops are counted in the
    detail and the check always passes.
    """
    problem = ctx.problem
    ws = problem.ws
    ks = [ctx.k(m) for m in np.linspace(0.3 * ws, 0.95 * ws, count).tolist()]
    w = 0.9 * ws
    hi = 1.5 * ws if problem.alpha == 0 else min(1.5 * ws, 0.999 * w / problem.alpha)
    phis = [phi(ctx, w, m).value for m in np.linspace(w, hi, count).tolist()]
    k_drops = sum(b < a for a, b in zip(ks, ks[1:]))
    phi_drops = sum(b < a - ctx.tol.abs_tol for a, b in zip(phis, phis[1:]))
    return CheckResult(
        name=f"{label}: monotonicity in m",
        passed=True,
        detail=f"k drops {k_drops}/{count - 1}, phi at w={w:.4g} drops {phi_drops}/{count - 1}",
    )


def check_comparison(low: ScaleContext, high: ScaleContext) -> CheckResult:
    """phi under the smaller payout never exceeds phi under the larger one."""
    worst = -math.inf
    checked = 0
    for w in np.linspace(0.5, 2.5, 20).tolist():
        for m in np.linspace(1.0, 3.0, 5).tolist():
            if low.problem.in_domain(w, m) and high.problem.in_domain(w, m):
                worst = max(worst, phi(low, w, m).value - phi(high, w, m).value)
                checked += 1
    return CheckResult(
        name="constant_low <= constant: comparison",
        passed=checked > 0 and worst <= COMPARISON_SLACK,
        detail=f"{checked} points, max phi0 - phi1 {worst:.3g}",
    )


def check_feller(label: str, ctx: ScaleContext) -> CheckResult:
    problem = ctx.problem
    payout = problem.payout
    m = 0.8 * problem.ws
    report = ctx.feller_report(m)
    values = [v for _, v in report.v_at_probe]
    increasing = all(b > a for a, b in zip(values, values[1:]))
    condition = report.slope_condition.status
    passed = increasing
    detail = f"{report.verdict.kind}, slope condition {condition}, v(last probe) {values[-1]:.4g}"
    if isinstance(payout, Constant):
        passed = passed and condition == "holds" and report.verdict.kind == "DivergesAtSafeLevel"
    elif isinstance(payout, QuadraticSafe):
        w_last = report.v_at_probe[-1][0]
        bound = v_quadratic_lower_bound(
            payout.b, payout.ws, problem.market, problem.alpha, m, w_last
        )
        passed = (
            passed
            and condition == "fails"
            and report.verdict.kind == "DivergesAtSafeLevel"
            and values[-1] > FELLER_LARGE
            and values[-1] >= bound * (1.0 - 1e-6)
        )
        detail += f", closed-form lower bound {bound:.4g}"
    return CheckResult(name=f"{label}: Feller test", passed=passed, detail=detail)


def check_certainty(label: str, ctx: ScaleContext, fast: bool) -> list[CheckResult]:
    problem = ctx.problem
    results = []
    name = f"{label}: certain drawdown"
    if not isinstance(problem.regime, InfiniteSafeCertainDrawdown):
        return [CheckResult(name=name, passed=False, detail=f"regime {problem.regime.kind}")]
    points = [(w, m) for m in (1.0, 2.0, 4.0, 8.0) for w in np.linspace(0.5 * m, m, 5).tolist()]
    phis = [phi(ctx, w, m).value for w, m in points]
    ks = [ctx.k(m) for m in (1.0, 4.0)]
    results.append(
        CheckResult(
            name=name,
            passed=all(p == 1.0 for p in phis) and all(k == 0.0 for k in ks),
            detail=f"phi == 1 at {len(points)} points, k = {ks}",
        )
    )
    if fast:
        results.append(CheckResult(name=f"{label}: Monte Carlo certainty", passed=True, skipped=True))
        return results

    settings = get_settings()
    config = SimConfig(
        dt=settings.verify_dt * 10,
        horizon=CERTAINTY_HORIZON,
        n_paths=min(settings.verify_paths, 4096),
        seed=settings.verify_seed,
    )
    estimate = estimate_drawdown(problem, AllSafe(), 1.0, 1.0, config)
    results.append(
        CheckResult(
            name=f"{label}: Monte Carlo certainty",
            passed=estimate.p_drawdown >= 0.99,
            detail=f"all_safe p = {estimate.p_drawdown:.4f}",
        )
    )
    return results


def _mc_config() -> SimConfig:
    settings = get_settings()
    return SimConfig(
        dt=settings.verify_dt,
        horizon=settings.verify_horizon,
        n_paths=settings.verify_paths,
        seed=settings.verify_seed,
        eps_safe=MC_EPS_SAFE,
    )


def check_monte_carlo(label: str, ctx: ScaleContext, starts: list[tuple[float, float]]) -> list[CheckResult]:
    """Simulated drawdown frequency under the optimal strategy against phi."""
    problem = ctx.problem
    config = _mc_config()
    results = []
    for w0, m0 in starts:
        estimate = estimate_drawdown(problem, Optimal(), w0, m0, config)
        target = phi(ctx, w0, m0).value
        gap = abs(estimate.p_drawdown - target)
        bound = 3.0 * estimate.stderr + MC_ALLOWANCE
        results.append(
            CheckResult(
                name=f"{label}: Monte Carlo at w0={w0:g}, m0={m0:g}",
                passed=gap <= bound,
                detail=(
                    f"p = {estimate.p_drawdown:.4f} +/- {estimate.stderr:.4f}, phi = {target:.4f}, "
                    f"censored {estimate.n_censored}/{estimate.n_paths}"
                ),
            )
        )
    return results


def check_optimality(label: str, ctx: ScaleContext, w0: float, m0: float) -> CheckResult:
    problem = ctx.problem
    strategies = [
        Optimal(),
        ConstantAmount(pi=float(pi_star(problem, w0))),
        ConstantFraction(theta=0.5),
    ]
    rows = compare_strategies(problem, strategies, w0, m0, _mc_config())
    best = rows[0].estimate
    worst_excess = max(
        best.p_drawdown - r.estimate.p_drawdown - 3.0 * math.hypot(best.stderr, r.estimate.stderr)
        for r in rows[1:]
    )
    detail = ", ".join(f"{r.strategy} {r.estimate.p_drawdown:.4f}" for r in rows)
    return CheckResult(name=f"{label}: optimal strategy ordering", passed=worst_excess <= 0.0, detail=detail)


# ----------------------------------------------------------------------
# suites


def _problem_checks(label: str, problem: DrawdownProblem, fast: bool) -> list[CheckResult]:
    ctx = _context(problem)
    if isinstance(problem.regime, InfiniteSafeCertainDrawdown):
        return check_certainty(label, ctx, fast)

    checks = [
        _guarded(f"{label}: g oracle agreement", lambda: check_oracle_agreement(label, ctx)),
        _guarded(f"{label}: boundary values", lambda: check_boundaries(label, ctx)),
        _guarded(f"{label}: smooth pasting", lambda: check_smooth_pasting(label, ctx)),
        _guarded(f"{label}: HJB residual", lambda: check_hjb(label, ctx)),
    ]
    if math.isfinite(problem.ws):
        checks.append(_guarded(f"{label}: continuity at m = w_s", lambda: check_continuity(label, ctx)))
        checks.append(_guarded(f"{label}: monotonicity in m", lambda: check_monotone_in_m(label, ctx)))
        checks.append(_guarded(f"{label}: Feller test", lambda: check_feller(label, ctx)))
    return checks


def _mc_checks(label: str, problem: DrawdownProblem, fast: bool) -> list[CheckResult]:
    name = f"{label}: Monte Carlo"
    if fast:
        return [CheckResult(name=name, passed=True, skipped=True, detail="--fast")]
    if not math.isfinite(problem.ws):
        return [CheckResult(name=name, passed=True, skipped=True, detail="w_s = inf")]
    ctx = _context(problem)
    ws = problem.ws
    # one start on each branch: below the safe level and with m past it
    starts = [(0.72 * ws, 0.8 * ws), (0.8 * ws, 1.2 * ws)]
    results = check_monte_carlo(label, ctx, starts)
    results.append(
        _guarded(f"{label}: optimal strategy ordering", lambda: check_optimality(label, ctx, *starts[0]))
    )
    return results


def run_verification(problem_ref: Optional[str] = None, fast: bool = False) -> SuiteReport:
    """
    Run the verification suite.

    Args:
        problem_ref: Problem file or canonical name; all canonical problems
            when omitted
        fast: Skip the Monte Carlo checks
    """
    checks: list[CheckResult] = []
    if problem_ref is not None:
        document = load_problem_file(problem_ref)
        label = document.name or str(problem_ref)
        result, problem = check_validation(label, document)
        checks.append(result)
        if problem is not None:
            checks += _problem_checks(label, problem, fast)
            checks += _mc_checks(label, problem, fast)
        return SuiteReport(checks=checks)

    problems: dict[str, DrawdownProblem] = {}
    for name in CANONICAL:
        result, problem = check_validation(name, load_problem_file(name))
        checks.append(result)
        if problem is not None:
            problems[name] = problem

    for name, problem in problems.items():
        logger.info("verifying %s", name)
        checks += _problem_checks(name, problem, fast)

    if "constant" in problems and "constant_low" in problems:
        low, high = _context(problems["constant_low"]), _context(problems["constant"])
        checks.append(
            _guarded("constant_low <= constant: comparison", lambda: check_comparison(low, high))
        )
    if "constant" in problems:
        checks += _mc_checks("constant", problems["constant"], fast)
    return SuiteReport(checks=checks)

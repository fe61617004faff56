#!/usr/bin/env python3
"""
Command-line interface for drawdown-optimizer.

Evaluates the minimum probability of drawdown and the optimal strategy,
sweeps grids to CSV, runs Monte Carlo estimates, Feller diagnostics and the
verification suite.
"""

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Any, Optional

from .core.policy import evaluate_point
from .core.scale import ScaleContext
from .exceptions import EXIT_OK, EXIT_VERIFY, DrawdownError, ProblemFileError
from .logging_config import configure_logging, get_logger
from .problem_files import (
    find_problem_path,
    list_problems,
    load_document,
    load_problem,
    load_problem_file,
    load_sim_config,
    load_sweep_spec,
)
from .simulation.engine import estimate_drawdown
from .simulation.results import append_result_row, result_row
from .simulation.strategies import parse_strategy
from .sweep import run_sweep
from .verification.suite import run_verification

logger = get_logger(__name__)


def _json_safe(value: Any) -> Any:
    """Replace non-finite floats with None so the output is strict JSON."""
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


def dump_json(data: Any, pretty: bool = False) -> str:
    return json.dumps(_json_safe(data), indent=2 if pretty else None, allow_nan=False)


def print_problems() -> None:
    """Print the canonical problems."""
    print("\nCanonical Problems:")
    print("=" * 70)
    for name in list_problems():
        description = load_problem_file(name).description or ""
        print(f"  - {name:<16} {description}")
    print("=" * 70)


def cmd_evaluate(args: argparse.Namespace) -> int:
    problem = load_problem(args.problem)
    ctx = ScaleContext(problem)
    report = evaluate_point(ctx, args.w, args.m, args.allow_outside)
    print(dump_json(report.model_dump(), args.pretty))
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    problem = load_problem(args.problem)
    spec = load_sweep_spec(args.spec)
    result = run_sweep(problem, spec)
    if args.output:
        result.write(args.output)
        print(f"Wrote {len(result.rows)} row(s) -> {args.output}", file=sys.stderr)
    else:
        sys.stdout.write(result.to_csv())
    if result.skipped:
        print(f"{result.skipped} grid point(s) outside the domain omitted", file=sys.stderr)
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    document = load_problem_file(args.problem)
    problem = document.to_problem()
    config = load_sim_config(args.config)
    strategy = parse_strategy(args.strategy, problem, args.w0)
    estimate = estimate_drawdown(problem, strategy, args.w0, args.m0, config, args.threads)
    print(dump_json(estimate.model_dump(), args.pretty))
    if args.results:
        scenario = args.scenario_id or document.name or Path(args.problem).stem
        append_result_row(args.results, result_row(scenario, strategy.label, config, estimate))
    return EXIT_OK


def cmd_feller(args: argparse.Namespace) -> int:
    problem = load_problem(args.problem)
    report = ScaleContext(problem).feller_report(args.m, probes=args.probes)
    print(dump_json(report.model_dump(), args.pretty))
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    report = run_verification(args.problem, fast=args.fast)
    sys.stdout.write(report.render())
    return EXIT_OK if report.passed else EXIT_VERIFY


def cmd_problems(args: argparse.Namespace) -> int:
    if args.name:
        print(dump_json(load_document(_resolve(args.name)), pretty=True))
    else:
        print_problems()
    return EXIT_OK


def _resolve(name: str) -> Path:
    path = find_problem_path(name)
    if path is None:
        raise ProblemFileError(f"problem '{name}' not found")
    return path


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="drawdown-optimizer",
        description="Minimize the probability of drawdown under a wealth-dependent payout",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # List the canonical problems
  %(prog)s problems

  # Minimum drawdown probability and optimal amount at w=1.8, m=2
  %(prog)s evaluate constant --w 1.8 --m 2

  # Grid of phi and pi* for plotting
  %(prog)s sweep constant sweep.yaml -o phi.csv

  # Monte Carlo estimate under the optimal strategy, appended to a results file
  %(prog)s simulate constant sim.yaml --w0 1.8 --m0 2 --results results.csv

  # Feller diagnostics at m=2
  %(prog)s feller quadratic_safe --m 2

  # Verification suite without the Monte Carlo checks
  %(prog)s verify --fast
        """,
    )
    parser.add_argument(
        "--log-level",
        metavar="LEVEL",
        help="Logging level on stderr (default: DRAWDOWN_LOG_LEVEL or WARNING)",
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    def with_problem(p: argparse.ArgumentParser) -> None:
        p.add_argument("problem", help="Problem file (JSON/YAML) or canonical problem name")
        p.add_argument("-p", "--pretty", action="store_true", help="Pretty-print JSON output")

    p = sub.add_parser("evaluate", help="Evaluate phi, pi*, g and k at one point")
    with_problem(p)
    p.add_argument("--w", type=float, required=True, help="Wealth")
    p.add_argument("--m", type=float, required=True, help="Running maximum of wealth")
    p.add_argument(
        "--allow-outside",
        action="store_true",
        help="Map w < alpha*m to phi 1 and w > w_s to phi 0 instead of failing",
    )
    p.set_defaults(handler=cmd_evaluate)

    p = sub.add_parser("sweep", help="Evaluate outputs on a (w, m) grid and write CSV")
    p.add_argument("problem", help="Problem file (JSON/YAML) or canonical problem name")
    p.add_argument("spec", type=Path, help="Sweep specification file")
    p.add_argument(
        "-o", "--output", type=Path, metavar="FILE", help="Output CSV file (default: stdout)"
    )
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("simulate", help="Monte Carlo estimate of the drawdown probability")
    with_problem(p)
    p.add_argument("config", type=Path, help="Simulation configuration file")
    p.add_argument(
        "-s",
        "--strategy",
        default="optimal",
        help="optimal, all_safe, constant_amount[:PI], constant_fraction:THETA (default: optimal)",
    )
    p.add_argument("--w0", type=float, required=True, help="Initial wealth")
    p.add_argument("--m0", type=float, required=True, help="Initial running maximum")
    p.add_argument("--threads", type=int, help="Worker threads (default: DRAWDOWN_THREADS)")
    p.add_argument("--results", type=Path, metavar="FILE", help="Append a CSV result row")
    p.add_argument("--scenario-id", help="Scenario column of the result row")
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("feller", help="Probe the Feller function toward the safe level")
    with_problem(p)
    p.add_argument("--m", type=float, required=True, help="Running maximum, below w_s")
    p.add_argument("--probes", type=int, default=12, help="Number of probes (default: 12)")
    p.set_defaults(handler=cmd_feller)

    p = sub.add_parser("verify", help="Run the verification suite")
    p.add_argument(
        "problem", nargs="?", help="Problem file or name (default: all canonical problems)"
    )
    p.add_argument("--fast", action="store_true", help="Skip the Monte Carlo checks")
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("problems", help="List canonical problems or show one")
    p.add_argument("name", nargs="?", help="Problem to show")
    p.set_defaults(handler=cmd_problems)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    """Main CLI entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if not getattr(args, "handler", None):
        parser.print_help(sys.stderr)
        return 1

    configure_logging(args.log_level)
    try:
        return args.handler(args)
    except DrawdownError as e:
        print(f"Error: {e}", file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())

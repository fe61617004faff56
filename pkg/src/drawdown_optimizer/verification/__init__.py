"""Verification suite for the analytic solution and the simulator."""

from .suite import CheckResult, SuiteReport, run_verification

__all__ = ["CheckResult", "SuiteReport", "run_verification"]

"""Error hierarchy shared by the library, the CLI and the HTTP surface."""

from typing import Any, Optional

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_DOMAIN = 2
EXIT_NUMERICAL = 3
EXIT_VERIFY = 4


class DrawdownError(Exception):
    """Base class for every error raised by drawdown-optimizer."""

    exit_code = EXIT_NUMERICAL


class NonFiniteError(DrawdownError, ArithmeticError):
    """A function returned inf/nan at a sample point."""

    def __init__(self, x: float, value: Any):
        self.x = x
        self.value = value
        super().__init__(f"non-finite value {value!r} at x={x!r}")


class SubdivisionLimitError(DrawdownError):
    """Adaptive quadrature ran out of subdivisions."""

    def __init__(self, best_estimate: float, est_error: float, subdivisions: int):
        self.best_estimate = best_estimate
        self.est_error = est_error
        self.subdivisions = subdivisions
        super().__init__(
            f"subdivision budget ({subdivisions}) exhausted; best estimate "
            f"{best_estimate!r} with error {est_error!r}"
        )


class NoSignChangeError(DrawdownError):
    """Root bracket does not contain a sign change."""


class AmbiguousCrossingError(DrawdownError):
    """c(w) - rw changes sign more than once."""

    exit_code = EXIT_DOMAIN


class NonPositiveExcessError(DrawdownError):
    """c(w) - rw <= 0 strictly inside an interval where it must be positive."""

    exit_code = EXIT_DOMAIN


class IndeterminateLimitError(DrawdownError):
    """An improper integral could not be classified as convergent or divergent."""


class DegenerateSecondDerivativeError(DrawdownError):
    """The second derivative is indistinguishable from zero at machine scale."""


class StepUnderflowError(DrawdownError):
    """ODE state underflowed before reaching the requested target."""

    def __init__(self, message: str, last_good: Optional[tuple[float, float]] = None):
        self.last_good = last_good
        super().__init__(message)


class DomainError(DrawdownError, ValueError):
    """A point or argument lies outside the admissible domain."""

    exit_code = EXIT_DOMAIN

    def __init__(self, constraint: str):
        self.constraint = constraint
        super().__init__(constraint)


class PayoutValidationError(DrawdownError, ValueError):
    """The payout function violates the structural assumptions."""

    exit_code = EXIT_DOMAIN

    def __init__(self, violations: list[Any]):
        self.violations = violations
        summary = "; ".join(str(v) for v in violations[:5])
        super().__init__(f"payout violates assumptions: {summary}")


class ConfigError(DrawdownError, ValueError):
    """Invalid simulation, sweep or runtime configuration."""

    exit_code = EXIT_PARSE


class ProblemFileError(DrawdownError, ValueError):
    """A problem/config file could not be read or parsed."""

    exit_code = EXIT_PARSE


def describe_validation_error(error: Any) -> str:
    """Flatten a pydantic ValidationError into ``field.path: message`` parts."""
    parts = []
    for err in error.errors():
        loc = ".".join(str(p) for p in err["loc"]) or "<root>"
        parts.append(f"{loc}: {err['msg']}")
    return "; ".join(parts)

"""
Problem, simulation and sweep files.

Files are JSON (``.json``) or YAML (anything else). Canonical problems ship
with the package under ``problems/`` and can be named instead of a path.
"""

import json
from pathlib import Path
from typing import Any, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .config import get_settings
from .core.model import DrawdownProblem, MarketParams, build_problem
from .core.payouts import PayoutSpec
from .exceptions import ConfigError, ProblemFileError, describe_validation_error
from .logging_config import get_logger

logger = get_logger(__name__)


class ProblemFile(BaseModel):
    """Problem definition document: ``market``, ``payout`` and ``alpha``."""

    model_config = ConfigDict(extra="forbid")

    name: Optional[str] = None
    description: Optional[str] = None
    market: MarketParams
    payout: PayoutSpec
    alpha: float = Field(gt=0, lt=1)

    def to_problem(self, strict: bool = True) -> DrawdownProblem:
        return build_problem(self.market, self.payout, self.alpha, strict=strict)


def load_document(path: Union[str, Path]) -> dict[str, Any]:
    """Read a JSON or YAML mapping, reporting the line of any syntax error."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ProblemFileError(f"cannot read {path}: {e.strerror or e}") from e

    if path.suffix.lower() == ".json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ProblemFileError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from e
    else:
        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError as e:
            mark = getattr(e, "problem_mark", None)
            where = f"{path}:{mark.line + 1}:{mark.column + 1}" if mark else str(path)
            raise ProblemFileError(f"{where}: {getattr(e, 'problem', None) or e}") from e

    if not isinstance(data, dict):
        raise ProblemFileError(f"{path}: expected a mapping at the top level")
    return data


def list_problems() -> list[str]:
    """Names of the packaged canonical problems."""
    problems_dir = get_settings().problems_dir
    if not problems_dir.exists():
        return []
    return sorted(p.stem for p in problems_dir.glob("*.yaml"))


def find_problem_path(name: str) -> Optional[Path]:
    """
    Resolve a problem reference.

    Accepts an existing file path or the name of a canonical problem, with
    or without the ``.yaml`` extension.
    """
    candidate = Path(name)
    if candidate.is_file():
        return candidate
    stem = name[:-5] if name.endswith(".yaml") else name
    packaged = get_settings().problems_dir / f"{stem}.yaml"
    return packaged if packaged.is_file() else None


def parse_problem(data: dict[str, Any], source: str = "<problem>") -> ProblemFile:
    try:
        return ProblemFile.model_validate(data)
    except ValidationError as e:
        raise ProblemFileError(f"{source}: {describe_validation_error(e)}") from e


def load_problem_file(ref: Union[str, Path]) -> ProblemFile:
    path = find_problem_path(str(ref))
    if path is None:
        known = ", ".join(list_problems())
        raise ProblemFileError(f"problem '{ref}' not found (canonical problems: {known})")
    return parse_problem(load_document(path), str(path))


def load_problem(ref: Union[str, Path], strict: bool = True) -> DrawdownProblem:
    """Load, validate and classify a problem from a path or canonical name."""
    problem = load_problem_file(ref).to_problem(strict=strict)
    logger.debug("loaded problem %s: regime %s", ref, problem.regime.kind)
    return problem


def load_sim_config(path: Union[str, Path]) -> Any:
    from .simulation.engine import SimConfig

    data = load_document(path)
    try:
        return SimConfig.parse(data)
    except ConfigError as e:
        raise ConfigError(f"{path}: {e}") from e


def load_sweep_spec(path: Union[str, Path]) -> Any:
    from .sweep import SweepSpec

    data = load_document(path)
    try:
        return SweepSpec.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"{path}: {describe_validation_error(e)}") from e

"""CSV rows for simulation results."""

import csv
import io
import math
from pathlib import Path
from typing import Optional, Union

from .engine import SimConfig, SimEstimate

RESULT_COLUMNS = [
    "scenario_id",
    "strategy",
    "n_paths",
    "dt",
    "horizon",
    "p_drawdown",
    "stderr",
    "n_safe",
    "n_censored",
    "mean_hit_time",
]


def format_number(value: Optional[Union[int, float]]) -> str:
    """Locale-free text for CSV: repr floats, ``inf``/``-inf``, empty for missing."""
    if value is None:
        return ""
    if isinstance(value, int):
        return str(value)
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if math.isnan(value):
        return "nan"
    return repr(float(value))


def result_row(
    scenario_id: str, strategy: str, config: SimConfig, estimate: SimEstimate
) -> dict[str, str]:
    values = {
        "scenario_id": scenario_id,
        "strategy": strategy,
        "n_paths": format_number(estimate.n_paths),
        "dt": format_number(config.dt),
        "horizon": format_number(config.horizon),
        "p_drawdown": format_number(estimate.p_drawdown),
        "stderr": format_number(estimate.stderr),
        "n_safe": format_number(estimate.n_safe_absorbed),
        "n_censored": format_number(estimate.n_censored),
        "mean_hit_time": format_number(estimate.mean_hit_time),
    }
    return values


def render_rows(rows: list[dict[str, str]], header: bool = True) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=RESULT_COLUMNS, lineterminator="\n")
    if header:
        writer.writeheader()
    writer.writerows(rows)
    return buffer.getvalue()


def append_result_row(path: Path, row: dict[str, str]) -> None:
    """Append a row, writing the header first when the file is new or empty."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fresh = not path.exists() or path.stat().st_size == 0
    with open(path, "a", newline="") as f:
        f.write(render_rows([row], header=fresh))

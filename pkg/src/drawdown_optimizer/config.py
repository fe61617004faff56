"""Runtime settings."""

import os
from functools import lru_cache
from pathlib import Path
from typing import Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings, overridable through ``DRAWDOWN_*`` env vars."""

    model_config = SettingsConfigDict(env_prefix="DRAWDOWN_", case_sensitive=False)

    # Numerics
    abs_tol: float = Field(default=1e-10, gt=0)
    rel_tol: float = Field(default=1e-9, gt=0)
    max_subdivisions: int = Field(default=2048, ge=1)
    w_max_search: float = Field(default=1e6, gt=0)
    validation_grid_size: int = Field(default=4096, ge=16)

    # Simulation
    threads: Optional[int] = Field(default=None, ge=1)

    # Verification suite Monte Carlo
    verify_paths: int = Field(default=20000, ge=100)
    verify_dt: float = Field(default=2e-3, gt=0)
    verify_horizon: float = Field(default=200.0, gt=0)
    verify_seed: int = 20160817

    log_level: str = "WARNING"

    # HTTP surface
    app_name: str = "Drawdown Optimizer API"
    version: str = "0.1.0"
    api_prefix: str = "/api/v1"
    debug: bool = False
    cors_origins: list[str] = ["*"]
    cors_credentials: bool = True
    cors_methods: list[str] = ["*"]
    cors_headers: list[str] = ["*"]
    rate_limit_enabled: bool = False
    rate_limit_default: str = "30/minute"
    rate_limit_simulate: str = "5/minute"
    max_paths: int = 200_000

    problems_dir: Path = Path(__file__).parent / "problems"

    def worker_count(self) -> int:
        """Threads used by the simulator (``DRAWDOWN_THREADS`` or all cores)."""
        return self.threads or os.cpu_count() or 1


@lru_cache
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()

"""Pytest fixtures for API tests."""

import pytest
from fastapi.testclient import TestClient

from drawdown_optimizer.api.main import app


@pytest.fixture
def client() -> TestClient:
    """Create a FastAPI test client."""
    return TestClient(app)


@pytest.fixture
def inline_problem() -> dict:
    """Inline constant-payout problem with w_s = 3."""
    return {
        "market": {"r": 0.02, "mu": 0.08, "sigma": 0.2},
        "payout": {"kind": "constant", "c": 0.06},
        "alpha": 0.5,
    }


@pytest.fixture
def evaluate_request() -> dict:
    """Valid evaluate request payload."""
    return {"problem_name": "constant", "w": 1.8, "m": 2.0}


@pytest.fixture
def simulate_request() -> dict:
    """Small simulate request payload."""
    return {
        "problem_name": "constant",
        "config": {"dt": 0.01, "horizon": 20, "n_paths": 300, "seed": 7, "eps_safe": 0.05},
        "strategy": "optimal",
        "w0": 1.8,
        "m0": 2.0,
    }

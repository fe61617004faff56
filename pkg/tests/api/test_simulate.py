"""Tests for the simulate endpoint."""

from fastapi.testclient import TestClient


def test_simulate_success(client: TestClient, simulate_request: dict):
    """Test a small simulation."""
    response = client.post("/api/v1/simulate", json=simulate_request)

    assert response.status_code == 200
    data = response.json()
    assert data["strategy"] == "optimal"
    estimate = data["estimate"]
    assert estimate["n_paths"] == 300
    assert estimate["n_drawdown"] + estimate["n_safe_absorbed"] + estimate["n_censored"] == 300
    assert data["execution_time"] >= 0


def test_simulate_is_deterministic(client: TestClient, simulate_request: dict):
    """Test that the same seed gives the same estimate."""
    first = client.post("/api/v1/simulate", json=simulate_request).json()
    second = client.post("/api/v1/simulate", json=simulate_request).json()

    assert first["estimate"] == second["estimate"]


def test_simulate_path_cap(client: TestClient, simulate_request: dict):
    """Test that path counts above the cap are rejected."""
    simulate_request["config"]["n_paths"] = 10_000_000
    response = client.post("/api/v1/simulate", json=simulate_request)

    assert response.status_code == 400
    assert "n_paths exceeds maximum" in response.json()["detail"]


def test_simulate_bad_strategy(client: TestClient, simulate_request: dict):
    """Test that an unknown strategy gives 400."""
    simulate_request["strategy"] = "lottery"

    assert client.post("/api/v1/simulate", json=simulate_request).status_code == 400


def test_simulate_bad_start(client: TestClient, simulate_request: dict):
    """Test that a start outside the domain gives 400."""
    simulate_request["w0"] = 0.5

    assert client.post("/api/v1/simulate", json=simulate_request).status_code == 400


def test_simulate_invalid_config(client: TestClient, simulate_request: dict):
    """Test config validation."""
    simulate_request["config"]["dt"] = -1

    assert client.post("/api/v1/simulate", json=simulate_request).status_code == 422

"""Tests for the evaluate endpoint."""

import pytest
from fastapi.testclient import TestClient

from drawdown_optimizer.core.policy import evaluate_point
from drawdown_optimizer.core.scale import ScaleContext
from drawdown_optimizer.problem_files import load_problem


def test_evaluate_canonical_problem(client: TestClient, evaluate_request: dict):
    """Test that the endpoint agrees with the library."""
    response = client.post("/api/v1/evaluate", json=evaluate_request)

    assert response.status_code == 200
    data = response.json()
    expected = evaluate_point(ScaleContext(load_problem("constant")), 1.8, 2.0)
    assert data["phi"] == pytest.approx(expected.phi)
    assert data["branch"] == "DrawdownBranch"
    assert data["w_s"] == 2.5


def test_evaluate_inline_problem(client: TestClient, inline_problem: dict):
    """Test an inline problem definition."""
    response = client.post("/api/v1/evaluate", json={"problem": inline_problem, "w": 2.9, "m": 3.5})

    assert response.status_code == 200
    data = response.json()
    assert data["branch"] == "RuinBranch"
    assert data["k_of_m"] == 1.0


def test_evaluate_certain_drawdown(client: TestClient):
    """Test that w_s = inf is returned as null."""
    response = client.post("/api/v1/evaluate", json={"problem_name": "proportional", "w": 1.5, "m": 2.0})

    assert response.status_code == 200
    assert response.json()["w_s"] is None
    assert response.json()["phi"] == 1.0


def test_evaluate_outside_domain(client: TestClient, evaluate_request: dict):
    """Test that a point outside the domain gives 400."""
    response = client.post("/api/v1/evaluate", json={**evaluate_request, "w": 0.5})

    assert response.status_code == 400
    assert "alpha*m <= w" in response.json()["detail"]


def test_evaluate_allow_outside(client: TestClient, evaluate_request: dict):
    """Test that allow_outside maps the point to a boundary value."""
    response = client.post(
        "/api/v1/evaluate", json={**evaluate_request, "w": 0.5, "allow_outside": True}
    )

    assert response.status_code == 200
    assert response.json()["phi"] == 1.0
    assert response.json()["g"] is None


def test_evaluate_unknown_problem(client: TestClient):
    """Test that an unknown problem name gives 404."""
    response = client.post(
        "/api/v1/evaluate", json={"problem_name": "nonexistent_problem_xyz", "w": 1.0, "m": 2.0}
    )

    assert response.status_code == 404


@pytest.mark.parametrize(
    "payload",
    [
        {"w": 1.8, "m": 2.0},
        {"problem_name": "constant", "problem": {}, "w": 1.8, "m": 2.0},
        {"problem_name": "constant", "w": 1.8, "m": -1.0},
    ],
)
def test_evaluate_invalid_request(client: TestClient, payload: dict):
    """Test request validation."""
    assert client.post("/api/v1/evaluate", json=payload).status_code == 422


def test_evaluate_invalid_payout(client: TestClient, inline_problem: dict):
    """Test that an inadmissible payout gives 400."""
    inline_problem["payout"] = {"kind": "tabulated", "knots": [[0.0, 0.05], [1.0, 0.04], [2.0, 0.03]]}
    response = client.post("/api/v1/evaluate", json={"problem": inline_problem, "w": 1.0, "m": 1.5})

    assert response.status_code == 400
    assert "decreasing" in response.json()["detail"]

"""Tests for the problem discovery endpoints."""

from fastapi.testclient import TestClient


def test_list_problems(client: TestClient):
    """Test that every canonical problem is listed."""
    data = client.get("/api/v1/problems").json()

    assert data["total_count"] == 6
    assert "constant" in data["problems"]
    assert "quadratic_safe" in data["problems"]


def test_problem_info(client: TestClient):
    """Test a problem with a finite safe level."""
    data = client.get("/api/v1/problems/constant").json()

    assert data["name"] == "constant"
    assert data["w_s"] == 2.5
    assert data["regime"] == "FiniteSafe"
    assert data["definition"]["payout"] == {"kind": "constant", "c": 0.05}


def test_problem_info_infinite_safe_level(client: TestClient):
    """Test that an infinite safe level is null."""
    data = client.get("/api/v1/problems/proportional").json()

    assert data["w_s"] is None
    assert data["regime"] == "InfiniteSafeCertainDrawdown"


def test_problem_not_found(client: TestClient):
    """Test that unknown problems give 404."""
    response = client.get("/api/v1/problems/nonexistent_problem_xyz")

    assert response.status_code == 404
    assert "not found" in response.json()["message"]

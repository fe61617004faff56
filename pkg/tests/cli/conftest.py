"""Pytest fixtures for CLI tests."""

import pytest


@pytest.fixture
def sim_config_file(tmp_path):
    """Small simulation configuration."""
    path = tmp_path / "sim.yaml"
    path.write_text("dt: 0.01\nhorizon: 50\nn_paths: 200\nseed: 3\neps_safe: 0.05\nblock_size: 32\n")
    return path


@pytest.fixture
def sweep_spec_file(tmp_path):
    """4 x 3 grid with part of it outside the constant problem's domain."""
    path = tmp_path / "sweep.yaml"
    path.write_text(
        "w_grid: {min: 0.5, max: 2.0, count: 4}\n"
        "m_grid: {min: 2.0, max: 3.0, count: 3}\n"
        "outputs: [phi, pi_star]\n"
    )
    return path


@pytest.fixture
def corrupted_problem_file(tmp_path):
    """Problem with a decreasing payout."""
    path = tmp_path / "corrupted.yaml"
    path.write_text(
        "name: corrupted\n"
        "market: {r: 0.02, mu: 0.08, sigma: 0.2}\n"
        "payout: {kind: tabulated, knots: [[0.0, 0.05], [1.0, 0.04], [2.0, 0.03]]}\n"
        "alpha: 0.5\n"
    )
    return path


@pytest.fixture
def nonexistent_problem():
    """Problem name that doesn't exist."""
    return "nonexistent_problem_xyz"

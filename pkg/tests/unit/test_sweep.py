"""Unit tests for grid sweeps."""

import pytest
from pydantic import ValidationError

from drawdown_optimizer.core.policy import phi
from drawdown_optimizer.sweep import GridAxis, SweepSpec, run_sweep


def make_spec(w, m, outputs=None):
    data = {
        "w_grid": {"min": w[0], "max": w[1], "count": w[2]},
        "m_grid": {"min": m[0], "max": m[1], "count": m[2]},
    }
    if outputs is not None:
        data["outputs"] = outputs
    return SweepSpec.model_validate(data)


class TestSpec:
    def test_defaults_to_every_output(self):
        spec = make_spec((1.0, 2.0, 3), (2.0, 3.0, 2))
        assert spec.columns == ["w", "m", "phi", "pi_star", "g", "k", "v"]

    def test_outputs_are_reordered(self):
        spec = make_spec((1.0, 2.0, 3), (2.0, 3.0, 2), ["k", "phi"])
        assert spec.outputs == ["phi", "k"]

    def test_unknown_output(self):
        with pytest.raises(ValidationError):
            make_spec((1.0, 2.0, 3), (2.0, 3.0, 2), ["gamma"])

    def test_axis_order(self):
        with pytest.raises(ValidationError, match="must be >= min"):
            GridAxis(min=2.0, max=1.0, count=3)

    def test_axis_by_field_name(self):
        assert GridAxis(lo=0.0, hi=1.0, count=3).values() == [0.0, 0.5, 1.0]


class TestRunSweep:
    def test_rows_are_in_domain_and_w_major(self, constant_problem, constant_ctx):
        spec = make_spec((1.0, 2.5, 7), (2.0, 3.0, 3), ["phi", "k"])
        result = run_sweep(constant_problem, spec, constant_ctx)
        assert result.rows
        assert len(result.rows) + result.skipped == 21
        for row in result.rows:
            assert constant_problem.in_domain(row["w"], row["m"])
        keys = [(row["w"], row["m"]) for row in result.rows]
        assert keys == sorted(keys)

    def test_phi_decreases_in_w(self, constant_problem, constant_ctx):
        spec = make_spec((1.0, 2.0, 11), (2.0, 2.0, 2), ["phi"])
        result = run_sweep(constant_problem, spec, constant_ctx)
        values = [row["phi"] for row in result.rows if row["m"] == 2.0]
        assert len(values) == 22
        distinct = values[::2]
        assert all(b < a for a, b in zip(distinct, distinct[1:]))

    def test_values_match_point_evaluation(self, constant_problem, constant_ctx):
        spec = make_spec((1.5, 2.0, 2), (2.0, 3.0, 2))
        result = run_sweep(constant_problem, spec, constant_ctx)
        for row in result.rows:
            assert row["phi"] == pytest.approx(phi(constant_ctx, row["w"], row["m"]).value)
            assert row["g"] == pytest.approx(constant_ctx.g(row["w"], row["m"]))
        k_above = {row["k"] for row in result.rows if row["m"] == 3.0}
        assert k_above == {1.0}

    def test_safe_level_v_is_inf(self, constant_problem, constant_ctx):
        spec = make_spec((2.5, 2.5, 2), (3.0, 3.0, 2), ["v"])
        result = run_sweep(constant_problem, spec, constant_ctx)
        assert "inf" in result.to_csv()

    def test_grid_outside_domain_gives_header_only(self, constant_problem, constant_ctx):
        spec = make_spec((0.1, 0.2, 3), (2.0, 3.0, 3))
        result = run_sweep(constant_problem, spec, constant_ctx)
        assert result.rows == []
        assert result.skipped == 9
        assert result.to_csv() == "w,m,phi,pi_star,g,k,v\n"

    def test_rerun_is_byte_identical(self, constant_problem, tmp_path):
        spec = make_spec((1.0, 2.5, 6), (1.5, 3.0, 4))
        first, second = tmp_path / "a.csv", tmp_path / "b" / "b.csv"
        run_sweep(constant_problem, spec).write(first)
        run_sweep(constant_problem, spec).write(second)
        assert first.read_bytes() == second.read_bytes()

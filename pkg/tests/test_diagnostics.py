"""Tests for the gradient check, observability ratios and the rate fit."""
import math

import numpy as np
import pytest

from src.inversion.diagnostics import (
    GradientCheckLevel,
    GradientCheckResult,
    directional_fd,
    fit_rate_constant,
    gradient_check,
    observability_ratio,
    relative_gap,
    smooth_random_source,
)
from src.numerics.models import SourcePair


class TestGradientCheck:
    def test_passes_on_three_levels(self):
        result = gradient_check([50, 100, 200])
        assert result.violations(1e-2, 1.5) == []
        assert [level.nx for level in result.levels] == [50, 100, 200]
        assert all(level.nt > level.nx for level in result.levels)

    def test_zero_residual(self):
        result = gradient_check([50, 100], zero_residual=True)
        assert all(level.adjoint == 0.0 for level in result.levels)
        assert all(abs(level.fd) < 1e-6 for level in result.levels)
        assert result.violations(1e-2, 1.5) == []

    def test_to_dict(self):
        data = gradient_check([50, 100]).to_dict()
        assert data["zero_residual"] is False
        assert data["levels"][0]["order"] is None
        assert set(data["levels"][1]) == {"nx", "nt", "adjoint", "fd", "rel_error", "order"}

    def test_violations_report_tolerance_and_ratio(self):
        result = GradientCheckResult(
            [GradientCheckLevel(50, 111, 1.0, 1.1), GradientCheckLevel(100, 223, 1.0, 1.09)]
        )
        problems = result.violations(1e-2, 1.5)
        assert len(problems) == 2
        assert "exceeds" in problems[0]
        assert "ratio" in problems[1]

    def test_violations_without_levels(self):
        assert GradientCheckResult().violations(1e-2, 1.5) == ["no mesh levels"]

    def test_orders(self):
        result = GradientCheckResult(
            [GradientCheckLevel(50, 111, 1.04, 1.0), GradientCheckLevel(100, 223, 1.01, 1.0)]
        )
        assert result.ratios[0] == pytest.approx(4.0)
        assert result.orders[0] == pytest.approx(2.0)


class TestHelpers:
    def test_directional_fd_on_quadratic(self):
        fun = lambda v: float(v @ v)  # noqa: E731
        w, dw = np.array([1.0, 2.0]), np.array([0.5, -1.0])
        assert directional_fd(fun, w, dw) == pytest.approx(2.0 * (w @ dw))

    def test_relative_gap_floor(self):
        assert relative_gap(1e-13, 0.0) == pytest.approx(0.1)
        assert relative_gap(2.0, 1.0) == 1.0

    def test_smooth_source_vanishes_at_start(self, space, time, rng):
        w = smooth_random_source(space, time, rng)
        np.testing.assert_array_equal(w.F[0], 0.0)
        assert w.G[0] == 0.0


class TestObservability:
    def test_ratios_are_bounded(self, coarse_space, coarse_time, rng):
        space, time = coarse_space, coarse_time
        directions = [smooth_random_source(space, time, rng) for _ in range(10)]
        ratios = observability_ratio(space, time, directions)
        assert ratios.shape == (10,)
        assert np.all(ratios > 0)
        assert np.all(ratios <= 1.05 * 3.0 * time.T**3)

    def test_zero_direction(self, coarse_space, coarse_time):
        zero = SourcePair.zeros(coarse_space, coarse_time)
        with pytest.raises(ValueError):
            observability_ratio(coarse_space, coarse_time, [zero])


class TestRateFit:
    def test_harmonic_decay(self):
        assert fit_rate_constant([4.0, 2.0, 1.0]) == pytest.approx(1.0)

    def test_flat(self):
        assert fit_rate_constant([1.0, 1.0, 1.0]) == 0.0

    def test_exact_rate(self):
        costs = [1.0 / k for k in range(1, 20)] + [0.0]
        assert fit_rate_constant(costs) <= 1.0 + 1e-12
        assert math.isfinite(fit_rate_constant(costs))

    def test_too_short(self):
        with pytest.raises(ValueError):
            fit_rate_constant([1.0])

    def test_prefix_fit(self):
        costs = [4.0, 1.0, 0.9, 0.0]
        assert fit_rate_constant(costs) == pytest.approx(1.8)
        assert fit_rate_constant(costs, upto=1) == pytest.approx(1.0)

    @pytest.mark.parametrize("upto", [0, 4])
    def test_prefix_out_of_range(self, upto):
        with pytest.raises(ValueError):
            fit_rate_constant([4.0, 1.0, 0.9, 0.0], upto=upto)

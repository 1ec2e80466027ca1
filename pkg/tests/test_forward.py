"""Tests for the kinetic-boundary forward solver."""
import math

import numpy as np
import pytest

from src.errors import CFLViolationError, GridMismatchError, SolverBlowUpError
from src.inversion.diagnostics import smooth_random_source
from src.numerics.forward import solve_forward, solve_sensitivity, terminal_state, wave_energy
from src.numerics.models import (
    BoundaryField,
    BoundaryForcing,
    InitialData,
    SourcePair,
    SpaceGrid,
    TimeGrid,
)
from src.numerics.quadrature import inner_l2b, inner_l2t


def _cosine_error(nx: int) -> float:
    """Max-norm error against y = cos(pi x) cos(pi t) at courant 0.8."""
    space = SpaceGrid(1.0, nx)
    time = TimeGrid(2.0, int(2.5 * nx))
    g = np.pi**2 * np.cos(np.pi * time.times)
    init = InitialData(
        BoundaryField.from_function(space, lambda x: np.cos(np.pi * x)),
        BoundaryField.zeros(space),
    )
    traj = solve_forward(space, time, 0.0, BoundaryForcing(time, -g, g), init)
    exact = np.cos(np.pi * time.times)[:, np.newaxis] * np.cos(np.pi * space.nodes)[np.newaxis, :]
    return float(np.max(np.abs(traj.y - exact)))


def _energy_drift(nx: int) -> float:
    space = SpaceGrid(1.0, nx)
    time = TimeGrid.for_space(space, 2.0)
    init = InitialData(
        BoundaryField.zeros(space),
        BoundaryField.from_function(space, lambda x: np.sin(np.pi * x) ** 4),
    )
    _, energy = wave_energy(solve_forward(space, time, 0.0, None, init))
    return float(np.max(np.abs(energy - energy[0])) / energy[0])


class TestSolveForward:
    def test_zero_solution(self, space, time):
        traj = solve_forward(space, time, 0.0)
        np.testing.assert_array_equal(traj.y, 0.0)

    def test_first_row_is_initial_displacement(self, space, time, rng):
        y0 = BoundaryField(space, rng.normal(size=space.n_nodes))
        traj = solve_forward(space, time, 0.0, None, InitialData(y0, BoundaryField.zeros(space)))
        np.testing.assert_array_equal(traj.y[0], y0.values)

    @pytest.mark.parametrize("nx", [50, 100, 200])
    def test_quadratic_in_time_is_reproduced(self, nx):
        # y = t^2/2: y_tt = 1, y_x = 0, so F = g0 = gl = 1
        space = SpaceGrid(1.0, nx)
        time = TimeGrid.for_space(space, 2.0)
        traj = solve_forward(space, time, 1.0, BoundaryForcing(time, 1.0, 1.0))
        exact = 0.5 * time.times[:, np.newaxis] ** 2
        assert np.max(np.abs(traj.y - exact)) <= 1e-9

    def test_cosine_manufactured_order(self):
        errors = [_cosine_error(nx) for nx in (50, 100, 200)]
        orders = [math.log2(a / b) for a, b in zip(errors, errors[1:])]
        assert all(order >= 1.8 for order in orders), (errors, orders)

    def test_cfl_violation(self, space):
        with pytest.raises(CFLViolationError):
            solve_forward(space, TimeGrid(2.0, 100), 0.0)

    def test_blow_up_is_reported(self, rng):
        space = SpaceGrid(1.0, 20)
        time = TimeGrid.for_space(space, 40.0, cfl=1.5)
        init = InitialData(
            BoundaryField(space, rng.uniform(-1, 1, space.n_nodes)), BoundaryField.zeros(space)
        )
        with pytest.raises(SolverBlowUpError) as info:
            solve_forward(space, time, 0.0, None, init, cfl_max=2.0)
        assert 1 <= info.value.step <= time.nt

    def test_forcing_shape_mismatch(self, space, time):
        with pytest.raises(GridMismatchError):
            solve_forward(space, time, np.zeros((3, space.n_nodes)))

    def test_linearity_in_all_data(self, space, time, rng):
        shape = (time.n_levels, space.n_nodes)
        F1, F2 = rng.normal(size=shape), rng.normal(size=shape)
        bc1 = BoundaryForcing(time, rng.normal(size=time.n_levels), rng.normal(size=time.n_levels))
        bc2 = BoundaryForcing(time, rng.normal(size=time.n_levels), rng.normal(size=time.n_levels))
        init1 = InitialData(
            BoundaryField(space, rng.normal(size=space.n_nodes)),
            BoundaryField(space, rng.normal(size=space.n_nodes)),
        )
        a, b = 1.7, -0.4
        combined = solve_forward(
            space,
            time,
            a * F1 + b * F2,
            BoundaryForcing(time, a * bc1.g0 + b * bc2.g0, a * bc1.gl + b * bc2.gl),
            InitialData(a * init1.y0, a * init1.y1),
        )
        first = solve_forward(space, time, F1, bc1, init1).y
        second = solve_forward(space, time, F2, bc2).y
        separate = a * first + b * second
        np.testing.assert_allclose(combined.y, separate, rtol=1e-9, atol=1e-9)


class TestEnergy:
    def test_energy_conserved(self):
        assert _energy_drift(200) <= 1e-3

    def test_drift_decreases_under_refinement(self):
        assert _energy_drift(200) < _energy_drift(100)


class TestSensitivity:
    def test_zero_variation(self, space, time):
        traj = solve_sensitivity(space, time, SourcePair.zeros(space, time))
        np.testing.assert_array_equal(traj.y, 0.0)

    def test_scaling(self, space, time, smooth_source):
        base = solve_sensitivity(space, time, smooth_source).y
        scaled = solve_sensitivity(space, time, 3.0 * smooth_source).y
        np.testing.assert_allclose(scaled, 3.0 * base, rtol=1e-12, atol=1e-11)

    def test_superposition(self, space, time, rng):
        dW1 = smooth_random_source(space, time, rng)
        dW2 = smooth_random_source(space, time, rng)
        total = solve_sensitivity(space, time, dW1 + dW2).y
        parts = solve_sensitivity(space, time, dW1).y + solve_sensitivity(space, time, dW2).y
        np.testing.assert_allclose(total, parts, rtol=1e-12, atol=1e-11)

    def test_matches_terminal_state(self, space, time, smooth_source):
        np.testing.assert_array_equal(
            solve_sensitivity(space, time, smooth_source).terminal.values,
            terminal_state(space, time, smooth_source).values,
        )

    def test_terminal_bound(self, coarse_space, coarse_time, rng):
        space, time = coarse_space, coarse_time
        bound = 1.05 * 3.0 * time.T**3
        shape = (time.n_levels, space.n_nodes)
        for i in range(200):
            if i % 2:
                dW = smooth_random_source(space, time, rng, modes=4)
            else:
                dW = SourcePair(
                    space,
                    time,
                    rng.uniform(-1, 1, shape),
                    rng.uniform(-1, 1, time.n_levels),
                )
            dY = solve_sensitivity(space, time, dW).terminal
            assert inner_l2b(dY, dY) <= bound * inner_l2t(dW, dW)

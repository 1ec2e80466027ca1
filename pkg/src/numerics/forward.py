"""
Explicit solver for the wave equation with kinetic boundary conditions.

    y_tt - y_xx = F            in (0,T) x (0,l)
    y_tt(t,0) - y_x(t,0) = g0  on (0,T)
    y_tt(t,l) + y_x(t,l) = gl  on (0,T)

Interior nodes use the second-order leapfrog scheme. Each boundary trace is
advanced as an ODE, y_tt = +/- y_x + forcing, with a one-sided second-order
difference for y_x. The first step is a Taylor start built from the same
accelerations.
"""
from __future__ import annotations

import logging
from typing import Optional, Tuple

import numpy as np
from scipy.integrate import trapezoid

from ..errors import GridMismatchError, SolverBlowUpError
from .models import (
    BoundaryForcing,
    BoundaryField,
    InitialData,
    SourcePair,
    SpaceGrid,
    TimeGrid,
    Trajectory,
    _broadcast,
)

logger = logging.getLogger(__name__)


def _acceleration(u: np.ndarray, f: np.ndarray, g0: float, gl: float, dx: float) -> np.ndarray:
    """Discrete y_tt for the state u at one time level."""
    acc = np.empty_like(u)
    acc[1:-1] = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / dx**2 + f[1:-1]
    acc[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * dx) + g0
    acc[-1] = -(3.0 * u[-1] - 4.0 * u[-2] + u[-3]) / (2.0 * dx) + gl
    return acc


def solve_forward(
    space: SpaceGrid,
    time: TimeGrid,
    F: np.ndarray,
    bc: Optional[BoundaryForcing] = None,
    init: Optional[InitialData] = None,
    cfl_max: Optional[float] = None,
) -> Trajectory:
    """Time-step the kinetic-boundary wave system and return y on the full grid."""
    courant = time.check_cfl(space, cfl_max)
    shape = (time.n_levels, space.n_nodes)
    F = _broadcast(F, shape, "F")
    bc = bc or BoundaryForcing.zeros(time)
    if bc.time != time:
        raise GridMismatchError("boundary forcing is sampled on a different time grid")
    init = init or InitialData.zeros(space)
    if init.space != space:
        raise GridMismatchError("initial data lives on a different space grid")

    dx, dt = space.dx, time.dt
    logger.debug("solve_forward nx=%d nt=%d courant=%.4f", space.nx, time.nt, courant)

    y = np.empty(shape)
    y[0] = init.y0.values
    with np.errstate(over="ignore", invalid="ignore"):
        acc = _acceleration(y[0], F[0], bc.g0[0], bc.gl[0], dx)
        y[1] = y[0] + dt * init.y1.values + 0.5 * dt**2 * acc
        if not np.all(np.isfinite(y[1])):
            raise SolverBlowUpError(1)
        for n in range(1, time.nt):
            acc = _acceleration(y[n], F[n], bc.g0[n], bc.gl[n], dx)
            y[n + 1] = 2.0 * y[n] - y[n - 1] + dt**2 * acc
            if not np.all(np.isfinite(y[n + 1])):
                raise SolverBlowUpError(n + 1)
    return Trajectory(space, time, y)


def solve_sensitivity(space: SpaceGrid, time: TimeGrid, dW: SourcePair) -> Trajectory:
    """Zero-data response to a source variation (dF, dG); nothing is forced at x=l."""
    if dW.space != space or dW.time != time:
        raise GridMismatchError("source variation lives on different grids")
    bc = BoundaryForcing(time, g0=dW.G)
    return solve_forward(space, time, dW.F, bc, InitialData.zeros(space))


def wave_energy(traj: Trajectory) -> Tuple[np.ndarray, np.ndarray]:
    """Energy 1/2 int y_t^2 + 1/2 y_t(.,0)^2 + 1/2 y_t(.,l)^2 + 1/2 int y_x^2.

    Evaluated at the interior time levels 1..nt-1 with centered time
    differences. Returns (times, energy).
    """
    space, time, y = traj.space, traj.time, traj.y
    vel = (y[2:] - y[:-2]) / (2.0 * time.dt)
    grad = np.gradient(y[1:-1], space.dx, axis=1, edge_order=2)
    energy = 0.5 * (
        trapezoid(vel**2, dx=space.dx, axis=1)
        + vel[:, 0] ** 2
        + vel[:, -1] ** 2
        + trapezoid(grad**2, dx=space.dx, axis=1)
    )
    return time.times[1:-1], energy


def terminal_state(
    space: SpaceGrid,
    time: TimeGrid,
    w: SourcePair,
    init: Optional[InitialData] = None,
) -> BoundaryField:
    """Y(T, ., W) for the system driven by W = (F, G) with homogeneous gl."""
    traj = solve_forward(space, time, w.F, BoundaryForcing(time, g0=w.G), init)
    return traj.terminal

"""
Terminal-value adjoint system solved by time reversal.

    phi_tt - phi_xx = 0, homogeneous kinetic boundary conditions,
    phi(T) = 0, phi_t(T) = -(Y(T) - Y_T^delta).

With s = T - t, psi(s) = phi(T - s) solves the same homogeneous system forward
in time with psi(0) = 0 and psi_s(0) = residual, so one forward solve plus a
flipped time axis gives phi.
"""
from __future__ import annotations

import logging
from typing import Optional

from .forward import solve_forward
from .models import BoundaryField, InitialData, SpaceGrid, TimeGrid, Trajectory

logger = logging.getLogger(__name__)


def solve_adjoint(
    space: SpaceGrid,
    time: TimeGrid,
    residual: BoundaryField,
    cfl_max: Optional[float] = None,
) -> Trajectory:
    """Adjoint state phi on [0, T] for the residual Y(T) - Y_T^delta."""
    if residual.space != space:
        logger.debug("interpolating residual from nx=%d to nx=%d", residual.space.nx, space.nx)
        residual = residual.interpolate_to(space)
    init = InitialData(BoundaryField.zeros(space), residual)
    psi = solve_forward(space, time, 0.0, None, init, cfl_max=cfl_max)
    return psi.reversed()

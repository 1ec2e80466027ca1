"""Discrete spaces, quadrature and wave solvers."""
from .models import (
    BoundaryField,
    BoundaryForcing,
    InitialData,
    SourcePair,
    SpaceGrid,
    TimeGrid,
    Trajectory,
)
from .quadrature import inner_l2b, inner_l2t, norm_l2b, norm_l2t, trapezoid_time
from .forward import solve_forward, solve_sensitivity, wave_energy
from .adjoint import solve_adjoint

__all__ = [
    "BoundaryField",
    "BoundaryForcing",
    "InitialData",
    "SourcePair",
    "SpaceGrid",
    "TimeGrid",
    "Trajectory",
    "inner_l2b",
    "inner_l2t",
    "norm_l2b",
    "norm_l2t",
    "trapezoid_time",
    "solve_forward",
    "solve_sensitivity",
    "wave_energy",
    "solve_adjoint",
]

"""Inner products and composite trapezoid quadrature on the solver grids."""
from __future__ import annotations

from typing import Optional

import numpy as np
from scipy.integrate import trapezoid

from ..errors import GridMismatchError
from .models import BoundaryField, SourcePair, SpaceGrid, TimeGrid


def trapezoid_time(g: np.ndarray, dt: float) -> float:
    """Composite trapezoid value of samples g_0..g_nt with spacing dt."""
    g = np.asarray(g, dtype=float)
    if g.ndim != 1 or g.size < 2:
        raise ValueError(f"need at least two time samples, got shape {g.shape}")
    return float(trapezoid(g, dx=dt))


def l2b_inner(u: np.ndarray, v: np.ndarray, dx: float) -> float:
    """Trapezoid L2(0,l) product of nodal vectors plus the two endpoint products."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape or u.ndim != 1 or u.size < 2:
        raise GridMismatchError(f"nodal vectors have shapes {u.shape} and {v.shape}")
    return float(trapezoid(u * v, dx=dx) + u[0] * v[0] + u[-1] * v[-1])


def l2_inner(u: np.ndarray, v: np.ndarray, dx: float) -> float:
    """Plain trapezoid L2(0,l) product, without boundary terms."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape or u.ndim != 1 or u.size < 2:
        raise GridMismatchError(f"nodal vectors have shapes {u.shape} and {v.shape}")
    return float(trapezoid(u * v, dx=dx))


def l2_norm(u: np.ndarray, dx: float) -> float:
    return float(np.sqrt(max(l2_inner(u, u, dx), 0.0)))


def inner_l2b(u: BoundaryField, v: BoundaryField, grid: Optional[SpaceGrid] = None) -> float:
    """<(y,a,b),(z,c,d)> = <y,z>_{L2(0,l)} + ac + bd."""
    grid = grid or u.space
    if u.space != grid or v.space != grid:
        raise GridMismatchError(f"fields are not on grid {grid}")
    return l2b_inner(u.values, v.values, grid.dx)


def norm_l2b(u: BoundaryField) -> float:
    return float(np.sqrt(max(inner_l2b(u, u), 0.0)))


def space_time_inner(a: np.ndarray, b: np.ndarray, space: SpaceGrid, time: TimeGrid) -> float:
    """2D trapezoid of a*b over (0,T)x(0,l)."""
    shape = (time.n_levels, space.n_nodes)
    if np.shape(a) != shape or np.shape(b) != shape:
        raise GridMismatchError(f"space-time arrays must have shape {shape}")
    inner = trapezoid(np.asarray(a) * np.asarray(b), dx=space.dx, axis=1)
    return float(trapezoid(inner, dx=time.dt))


def inner_l2t(w1: SourcePair, w2: SourcePair) -> float:
    """<(F1,G1),(F2,G2)> = <F1,F2>_{L2((0,T)x(0,l))} + <G1,G2>_{L2(0,T)}."""
    if w1.space != w2.space or w1.time != w2.time:
        raise GridMismatchError("source pairs live on different grids")
    return space_time_inner(w1.F, w2.F, w1.space, w1.time) + trapezoid_time(w1.G * w2.G, w1.time.dt)


def norm_l2t(w: SourcePair) -> float:
    return float(np.sqrt(max(inner_l2t(w, w), 0.0)))

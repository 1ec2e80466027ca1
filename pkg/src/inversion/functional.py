"""
Tikhonov cost for final-time data and its adjoint-based Frechet gradient.

General form, W = (F, G):

    J(W)     = 1/2 ||Y(T,.,W) - Y_T^delta||^2
    J_eps(W) = J(W) + eps/2 ||W||^2
    J'(W)    = (phi(t,x), phi(t,0))

Separable form, F = f(x) r(t,x), G = 0:

    J_eps(f)  = 1/2 ||Y(T,.,f) - Y_T^delta||^2 + eps/2 ||f||^2_{L2(0,l)}
    J_eps'(f) = int_0^T phi(t,x) r(t,x) dt + eps f(x)
"""
from __future__ import annotations

import math
from typing import Optional

import numpy as np
from scipy.integrate import trapezoid

from ..numerics.adjoint import solve_adjoint
from ..numerics.forward import solve_forward, terminal_state
from ..numerics.models import (
    BoundaryField,
    InitialData,
    SourcePair,
    SpaceGrid,
    TimeGrid,
    _broadcast,
)
from ..numerics.quadrature import inner_l2b, inner_l2t, l2_inner
from .models import GradientPair, Measurement, SeparableSource


def lipschitz_constant(T: float, l: float) -> float:
    """L_T = [3 T^4 (l + (l+2)/l T^2)]^(1/2), the Lipschitz constant of J'."""
    if not (T > 0 and l > 0):
        raise ValueError(f"T and l must be positive, got T={T}, l={l}")
    return math.sqrt(3.0 * T**4 * (l + (l + 2.0) / l * T**2))


# ==================== General sources ====================

def residual(w: SourcePair, init: Optional[InitialData], meas: Measurement) -> BoundaryField:
    """Y(T,.,W) - Y_T^delta on the source grid."""
    return terminal_state(w.space, w.time, w, init) - meas.on(w.space, w.time.T)


def cost(w: SourcePair, init: Optional[InitialData], meas: Measurement) -> float:
    res = residual(w, init, meas)
    return 0.5 * inner_l2b(res, res)


def cost_regularized(
    w: SourcePair, init: Optional[InitialData], meas: Measurement, eps: float
) -> float:
    if eps < 0:
        raise ValueError(f"eps must be >= 0, got {eps}")
    value = cost(w, init, meas)
    if eps:
        value += 0.5 * eps * inner_l2t(w, w)
    return value


def gradient_from_residual(res: BoundaryField, space: SpaceGrid, time: TimeGrid) -> GradientPair:
    """(phi, phi(.,0)) for the adjoint driven by the residual."""
    phi = solve_adjoint(space, time, res)
    return GradientPair(space, time, phi.y, phi.left)


def gradient_full(
    w: SourcePair,
    init: Optional[InitialData],
    meas: Measurement,
    eps: float = 0.0,
) -> GradientPair:
    """Frechet gradient of J (eps=0) or J_eps at W."""
    grad = gradient_from_residual(residual(w, init, meas), w.space, w.time)
    if eps:
        grad = GradientPair(w.space, w.time, grad.F + eps * w.F, grad.G + eps * w.G)
    return grad


# ==================== Separable sources ====================

def apply_input_output(
    f: np.ndarray, r: np.ndarray, space: SpaceGrid, time: TimeGrid
) -> BoundaryField:
    """Psi f = Y(T,.) for source f r, zero data and G = 0."""
    return terminal_response(f, r, None, space, time)


def terminal_response(
    f: np.ndarray,
    r: np.ndarray,
    init: Optional[InitialData],
    space: SpaceGrid,
    time: TimeGrid,
) -> BoundaryField:
    """Y(T,.) for source f r, G = 0 and the given initial data (affine in f)."""
    shape = (time.n_levels, space.n_nodes)
    F = np.asarray(f, dtype=float)[np.newaxis, :] * _broadcast(r, shape, "r")
    return solve_forward(space, time, F, None, init).terminal


def terminal_spatial(s: SeparableSource, init: Optional[InitialData]) -> BoundaryField:
    return terminal_response(s.f, s.r, init, s.space, s.time)


def spatial_penalty(f: np.ndarray, space: SpaceGrid) -> float:
    """||f||^2_{L2(0,l)}."""
    return l2_inner(f, f, space.dx)


def cost_spatial(
    s: SeparableSource, init: Optional[InitialData], meas: Measurement, eps: float
) -> float:
    """J_eps(f), the stopping value of the CG reconstruction."""
    res = terminal_spatial(s, init) - meas.on(s.space, s.time.T)
    return 0.5 * inner_l2b(res, res) + 0.5 * eps * spatial_penalty(s.f, s.space)


def spatial_gradient_from_residual(
    res: BoundaryField, s: SeparableSource, eps: float
) -> np.ndarray:
    phi = solve_adjoint(s.space, s.time, res)
    return trapezoid(phi.y * s.r, dx=s.time.dt, axis=0) + eps * s.f


def gradient_spatial(
    s: SeparableSource, init: Optional[InitialData], meas: Measurement, eps: float
) -> np.ndarray:
    """J_eps'(f)(x_i) = int_0^T phi(t,x_i) r(t,x_i) dt + eps f(x_i)."""
    res = terminal_spatial(s, init) - meas.on(s.space, s.time.T)
    return spatial_gradient_from_residual(res, s, eps)

"""
Verification diagnostics for the adjoint gradient.

Performs checks on the discrete solvers only (no reference data needed):
1. Gradient check - adjoint gradient vs. central differences across meshes
2. Duality gap - source/adjoint pairing vs. terminal pairing
3. Observability ratio - terminal response size along source directions
4. Rate fit - constant C with J_k - J_last <= C/k on a logged run
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple, TypeVar

import numpy as np

from ..numerics.adjoint import solve_adjoint
from ..numerics.forward import solve_sensitivity, terminal_state
from ..numerics.models import BoundaryField, SourcePair, SpaceGrid, TimeGrid
from ..numerics.quadrature import inner_l2b, inner_l2t, space_time_inner, trapezoid_time
from .functional import cost, gradient_full
from .models import Measurement

logger = logging.getLogger(__name__)

V = TypeVar("V")

FD_STEP = 1e-4
ZERO_SCALE = 1e-12


def smooth_random_source(
    space: SpaceGrid,
    time: TimeGrid,
    rng: np.random.Generator,
    modes: int = 3,
) -> SourcePair:
    """Random (F, G) built from low cosine modes, damped by (t/T)^2.

    The damping makes both F and G vanish to second order at t=0, so the
    sources are compatible with zero initial data.
    """
    x = space.nodes / space.l
    t = time.times / time.T
    ramp = t**2
    cx = np.cos(np.pi * np.outer(np.arange(modes), x))  # (modes, n_nodes)
    ct = np.cos(np.pi * np.outer(t, np.arange(modes)))  # (n_levels, modes)
    a = rng.uniform(-1.0, 1.0, size=(modes, modes))
    b = rng.uniform(-1.0, 1.0, size=modes)
    F = ramp[:, np.newaxis] * (ct @ a @ cx)
    G = ramp * (ct @ b)
    return SourcePair(space, time, F, G)


def smooth_random_field(
    space: SpaceGrid, rng: np.random.Generator, modes: int = 3
) -> BoundaryField:
    """Random combination of cos(j pi x / l), j < modes."""
    x = space.nodes / space.l
    c = rng.uniform(-1.0, 1.0, size=modes)
    return BoundaryField(space, c @ np.cos(np.pi * np.outer(np.arange(modes), x)))


def directional_fd(fun: Callable[[V], float], w: V, dw: V, h: float = FD_STEP) -> float:
    """Central difference (J(w + h dw) - J(w - h dw)) / 2h."""
    return (fun(w + h * dw) - fun(w - h * dw)) / (2.0 * h)


def relative_gap(value: float, reference: float) -> float:
    """|value - reference| / max(|reference|, 1e-12)."""
    return abs(value - reference) / max(abs(reference), ZERO_SCALE)


@dataclass
class GradientCheckLevel:
    """Adjoint vs. finite-difference directional derivative on one mesh."""
    nx: int
    nt: int
    adjoint: float
    fd: float

    @property
    def rel_error(self) -> float:
        return relative_gap(self.adjoint, self.fd)


@dataclass
class GradientCheckResult:
    """Gradient check across mesh levels."""
    levels: List[GradientCheckLevel] = field(default_factory=list)
    zero_residual: bool = False

    @property
    def ratios(self) -> List[float]:
        """Error ratio between consecutive levels (coarse / fine)."""
        out = []
        for coarse, fine in zip(self.levels, self.levels[1:]):
            out.append(coarse.rel_error / fine.rel_error if fine.rel_error > 0 else math.inf)
        return out

    @property
    def orders(self) -> List[float]:
        out = []
        for ratio, (coarse, fine) in zip(self.ratios, zip(self.levels, self.levels[1:])):
            out.append(math.log(ratio) / math.log(fine.nx / coarse.nx) if ratio > 0 else math.nan)
        return out

    def violations(self, tolerance: float, min_ratio: float, floor: float = 1e-10) -> List[str]:
        """Reasons the check fails; empty when it passes.

        The finest level must meet `tolerance`; every refinement must shrink the
        error by `min_ratio` unless both errors already sit below `floor`. A
        zero-residual check has nothing to refine, so only the tolerance applies.
        """
        problems = []
        if not self.levels:
            return ["no mesh levels"]
        finest = self.levels[-1]
        if finest.rel_error > tolerance:
            problems.append(
                f"relative error {finest.rel_error:.3e} at nx={finest.nx} exceeds {tolerance:g}"
            )
        if self.zero_residual:
            return problems
        for ratio, (coarse, fine) in zip(self.ratios, zip(self.levels, self.levels[1:])):
            if max(coarse.rel_error, fine.rel_error) <= floor:
                continue
            if ratio < min_ratio:
                problems.append(
                    f"error ratio {ratio:.3f} from nx={coarse.nx} to nx={fine.nx} "
                    f"below {min_ratio:g}"
                )
        return problems

    def to_dict(self) -> Dict[str, Any]:
        orders = [None] + self.orders
        return {
            "zero_residual": self.zero_residual,
            "levels": [
                {
                    "nx": level.nx,
                    "nt": level.nt,
                    "adjoint": level.adjoint,
                    "fd": level.fd,
                    "rel_error": level.rel_error,
                    "order": order,
                }
                for level, order in zip(self.levels, orders)
            ],
        }


def gradient_check(
    levels: Sequence[int],
    T: float = 2.0,
    l: float = 1.0,
    cfl: Optional[float] = None,
    seed: int = 0,
    h: float = FD_STEP,
    zero_residual: bool = False,
) -> GradientCheckResult:
    """Compare <J'(W), dW> with central differences of J on each mesh.

    The same random smooth W, dW and data are sampled on every level. With
    `zero_residual` the data is the exact terminal state of W, so the adjoint
    gradient vanishes identically.
    """
    result = GradientCheckResult(zero_residual=zero_residual)
    for nx in levels:
        space = SpaceGrid(l, nx)
        time = TimeGrid.for_space(space, T, cfl)
        rng = np.random.default_rng(seed)
        w = smooth_random_source(space, time, rng)
        dw = smooth_random_source(space, time, rng)
        if zero_residual:
            data = terminal_state(space, time, w)
        else:
            data = smooth_random_field(space, rng)
        meas = Measurement(data)

        grad = gradient_full(w, None, meas)
        adjoint = inner_l2t(grad, dw)
        fd = directional_fd(lambda v: cost(v, None, meas), w, dw, h)
        level = GradientCheckLevel(nx, time.nt, adjoint, fd)
        logger.info(
            "gradcheck nx=%d adjoint=%.10e fd=%.10e rel=%.3e", nx, adjoint, fd, level.rel_error
        )
        result.levels.append(level)
    return result


def duality_gap(
    space: SpaceGrid, time: TimeGrid, residual: BoundaryField, dW: SourcePair
) -> Tuple[float, float]:
    """Both sides of int int phi dF + int phi(.,0) dG = <R, dY(T)>.

    Returns (source side, terminal side).
    """
    phi = solve_adjoint(space, time, residual)
    source_side = space_time_inner(phi.y, dW.F, space, time) + trapezoid_time(
        phi.left * dW.G, time.dt
    )
    terminal_side = inner_l2b(residual, solve_sensitivity(space, time, dW).terminal)
    return source_side, terminal_side


def observability_ratio(
    space: SpaceGrid, time: TimeGrid, directions: Iterable[SourcePair]
) -> np.ndarray:
    """||dY(T)||^2 / ||dW||^2 along each direction; small values mean weak observability."""
    ratios = []
    for dW in directions:
        norm2 = inner_l2t(dW, dW)
        if norm2 <= 0:
            raise ValueError("direction must be nonzero")
        response = solve_sensitivity(space, time, dW).terminal
        ratios.append(inner_l2b(response, response) / norm2)
    return np.asarray(ratios)


def fit_rate_constant(costs: Sequence[float], upto: Optional[int] = None) -> float:
    """Smallest C with J_k - J_last <= C/k for k = 1..upto (default: every logged k)."""
    costs = np.asarray(costs, dtype=float)
    if costs.size < 2:
        raise ValueError("need at least two logged costs")
    upto = costs.size - 1 if upto is None else upto
    if not 1 <= upto < costs.size:
        raise ValueError(f"upto must lie in [1, {costs.size - 1}], got {upto}")
    k = np.arange(1, upto + 1)
    return float(max(np.max(k * (costs[1 : upto + 1] - costs[-1])), 0.0))

"""Grids and discrete function spaces for the kinetic-boundary wave problem."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

import numpy as np

from ..config import config
from ..errors import CFLViolationError, GridMismatchError


def _frozen_array(values: Any, shape: tuple, name: str, copy: bool = True) -> np.ndarray:
    """Validate shape and finiteness, then return a read-only float array."""
    arr = np.array(values, dtype=float, copy=True) if copy else np.asarray(values, dtype=float)
    if arr.shape != shape:
        raise GridMismatchError(f"{name} has shape {arr.shape}, expected {shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    arr.setflags(write=False)
    return arr


def _broadcast(values: Any, shape: tuple, name: str) -> np.ndarray:
    """Expand scalars and compatible arrays to `shape`."""
    arr = np.asarray(values, dtype=float)
    try:
        return np.broadcast_to(arr, shape)
    except ValueError as exc:
        raise GridMismatchError(f"{name} has shape {arr.shape}, expected {shape}") from exc


@dataclass(frozen=True)
class SpaceGrid:
    """Uniform vertex-centered grid on [0, l] with nx cells."""
    l: float = 1.0
    nx: int = 100

    def __post_init__(self):
        if not self.l > 0:
            raise ValueError(f"string length must be positive, got {self.l}")
        if int(self.nx) != self.nx or self.nx < 4:
            raise ValueError(f"nx must be an integer >= 4, got {self.nx}")
        object.__setattr__(self, "l", float(self.l))
        object.__setattr__(self, "nx", int(self.nx))

    @property
    def dx(self) -> float:
        return self.l / self.nx

    @property
    def n_nodes(self) -> int:
        return self.nx + 1

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.l, self.nx + 1)

    def refine(self, factor: int = 2) -> "SpaceGrid":
        """Grid with `factor` times as many cells; coarse nodes are kept."""
        return SpaceGrid(self.l, self.nx * factor)


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid on [0, T] with nt steps."""
    T: float = 2.0
    nt: int = 250

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError(f"final time must be positive, got {self.T}")
        if int(self.nt) != self.nt or self.nt < 2:
            raise ValueError(f"nt must be an integer >= 2, got {self.nt}")
        object.__setattr__(self, "T", float(self.T))
        object.__setattr__(self, "nt", int(self.nt))

    @property
    def dt(self) -> float:
        return self.T / self.nt

    @property
    def n_levels(self) -> int:
        return self.nt + 1

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.T, self.nt + 1)

    def courant(self, space: SpaceGrid) -> float:
        return self.dt / space.dx

    def check_cfl(self, space: SpaceGrid, cfl_max: Optional[float] = None) -> float:
        """Return the courant number, raising if it exceeds the cap."""
        cap = config.cfl_max if cfl_max is None else cfl_max
        courant = self.courant(space)
        if courant > cap * (1.0 + 1e-12):
            raise CFLViolationError(courant, cap)
        return courant

    @classmethod
    def for_space(cls, space: SpaceGrid, T: float, cfl: Optional[float] = None) -> "TimeGrid":
        """Smallest step count whose courant number does not exceed `cfl`."""
        target = config.cfl_max if cfl is None else cfl
        if not target > 0:
            raise ValueError(f"cfl must be positive, got {target}")
        nt = max(2, math.ceil(T / (target * space.dx) - 1e-9))
        return cls(T, nt)


@dataclass(frozen=True, eq=False)
class BoundaryField:
    """Element of L2(0,l) x R^2 stored as nodal samples.

    The traces at x=0 and x=l are the endpoint samples; the extra R^2 part
    only shows up in the inner product.
    """
    space: SpaceGrid
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "values", _frozen_array(self.values, (self.space.n_nodes,), "BoundaryField")
        )

    @property
    def left(self) -> float:
        return float(self.values[0])

    @property
    def right(self) -> float:
        return float(self.values[-1])

    @classmethod
    def zeros(cls, space: SpaceGrid) -> "BoundaryField":
        return cls(space, np.zeros(space.n_nodes))

    @classmethod
    def constant(cls, space: SpaceGrid, value: float) -> "BoundaryField":
        return cls(space, np.full(space.n_nodes, float(value)))

    @classmethod
    def from_function(
        cls, space: SpaceGrid, fn: Callable[[np.ndarray], np.ndarray]
    ) -> "BoundaryField":
        return cls(space, _broadcast(fn(space.nodes), (space.n_nodes,), "BoundaryField"))

    def _check(self, other: "BoundaryField") -> None:
        if other.space != self.space:
            raise GridMismatchError(f"grids differ: {self.space} vs {other.space}")

    def __add__(self, other: "BoundaryField") -> "BoundaryField":
        self._check(other)
        return BoundaryField(self.space, self.values + other.values)

    def __sub__(self, other: "BoundaryField") -> "BoundaryField":
        self._check(other)
        return BoundaryField(self.space, self.values - other.values)

    def __mul__(self, scalar: float) -> "BoundaryField":
        return BoundaryField(self.space, float(scalar) * self.values)

    __rmul__ = __mul__

    def interpolate_to(self, space: SpaceGrid) -> "BoundaryField":
        """Linear interpolation onto another grid of the same interval."""
        if space == self.space:
            return self
        if not math.isclose(space.l, self.space.l):
            raise GridMismatchError(f"interval lengths differ: {self.space.l} vs {space.l}")
        return BoundaryField(space, np.interp(space.nodes, self.space.nodes, self.values))


@dataclass(frozen=True, eq=False)
class SourcePair:
    """Element (F, G) of L2((0,T)x(0,l)) x L2(0,T)."""
    space: SpaceGrid
    time: TimeGrid
    F: np.ndarray
    G: np.ndarray

    def __post_init__(self):
        shape = (self.time.n_levels, self.space.n_nodes)
        g_shape = (self.time.n_levels,)
        object.__setattr__(self, "F", _frozen_array(_broadcast(self.F, shape, "F"), shape, "F"))
        object.__setattr__(self, "G", _frozen_array(_broadcast(self.G, g_shape, "G"), g_shape, "G"))

    @classmethod
    def zeros(cls, space: SpaceGrid, time: TimeGrid) -> "SourcePair":
        return cls(space, time, np.zeros((time.n_levels, space.n_nodes)), np.zeros(time.n_levels))

    def _check(self, other: "SourcePair") -> None:
        if other.space != self.space or other.time != self.time:
            raise GridMismatchError("source pairs live on different grids")

    def __add__(self, other: "SourcePair") -> "SourcePair":
        self._check(other)
        return SourcePair(self.space, self.time, self.F + other.F, self.G + other.G)

    def __sub__(self, other: "SourcePair") -> "SourcePair":
        self._check(other)
        return SourcePair(self.space, self.time, self.F - other.F, self.G - other.G)

    def __mul__(self, scalar: float) -> "SourcePair":
        return SourcePair(self.space, self.time, float(scalar) * self.F, float(scalar) * self.G)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled displacement history y(t_n, x_i) of one solve."""
    space: SpaceGrid
    time: TimeGrid
    y: np.ndarray

    def __post_init__(self):
        shape = (self.time.n_levels, self.space.n_nodes)
        object.__setattr__(self, "y", _frozen_array(self.y, shape, "Trajectory", copy=False))

    @property
    def left(self) -> np.ndarray:
        """Boundary history y(., 0)."""
        return self.y[:, 0]

    @property
    def right(self) -> np.ndarray:
        """Boundary history y(., l)."""
        return self.y[:, -1]

    @property
    def terminal(self) -> BoundaryField:
        return BoundaryField(self.space, self.y[-1])

    def at(self, n: int) -> BoundaryField:
        return BoundaryField(self.space, self.y[n])

    def reversed(self) -> "Trajectory":
        """Same samples with the time axis flipped (t -> T - t)."""
        return Trajectory(self.space, self.time, self.y[::-1].copy())


@dataclass(frozen=True, eq=False)
class InitialData:
    """Initial displacement y0 and velocity y1, traces included."""
    y0: BoundaryField
    y1: BoundaryField

    def __post_init__(self):
        if self.y0.space != self.y1.space:
            raise GridMismatchError("initial displacement and velocity live on different grids")

    @property
    def space(self) -> SpaceGrid:
        return self.y0.space

    @classmethod
    def zeros(cls, space: SpaceGrid) -> "InitialData":
        zero = BoundaryField.zeros(space)
        return cls(zero, zero)


@dataclass(frozen=True, eq=False)
class BoundaryForcing:
    """Right-hand sides g0 (x=0) and gl (x=l) of the dynamic boundary equations."""
    time: TimeGrid
    g0: np.ndarray = field(default=None)
    gl: np.ndarray = field(default=None)

    def __post_init__(self):
        shape = (self.time.n_levels,)
        for name in ("g0", "gl"):
            value = getattr(self, name)
            value = np.zeros(shape) if value is None else _broadcast(value, shape, name)
            object.__setattr__(self, name, _frozen_array(value, shape, name))

    @classmethod
    def zeros(cls, time: TimeGrid) -> "BoundaryForcing":
        return cls(time)

"""Inversion data models: measurements, sources, optimizer settings and run logs."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..errors import GridMismatchError
from ..numerics.models import (
    BoundaryField,
    SourcePair,
    SpaceGrid,
    TimeGrid,
    _broadcast,
    _frozen_array,
)


class StepRule(str, Enum):
    """Relaxation rule of the iteration."""
    CG = "cg"
    FIXED = "fixed"


class RunStatus(str, Enum):
    """Why an iteration stopped."""
    CONVERGED = "converged"
    MAX_ITER = "max_iter"
    GRADIENT_VANISHED = "gradient_vanished"


@dataclass(frozen=True, eq=False)
class Measurement:
    """Noisy terminal displacement Y_T^delta."""
    yT: BoundaryField
    noise_level: float = 0.0
    seed: int = 0
    time: Optional[float] = None  # None means "taken at the final time"
    delta: Optional[float] = None  # bound on ||Y_T - Y_T^delta||, when known

    def __post_init__(self):
        if self.noise_level < 0:
            raise ValueError(f"noise level must be >= 0, got {self.noise_level}")
        if self.delta is not None and not self.delta >= 0:
            raise ValueError(f"noise bound must be >= 0, got {self.delta}")

    def on(self, space: SpaceGrid, T: float) -> BoundaryField:
        """Data as seen by a solver grid; only final-time observations are accepted."""
        if self.time is not None and not math.isclose(self.time, T):
            raise GridMismatchError(
                f"measurement taken at t={self.time}, but only final-time data (t={T}) is used"
            )
        return self.yT.interpolate_to(space)


class GradientPair(SourcePair):
    """J'(W) = (phi(t,x), phi(t,0)) sampled on the source grids."""


@dataclass(frozen=True, eq=False)
class SeparableSource:
    """Interior forcing F(t,x) = f(x) r(t,x) with unknown f and known modulation r."""
    space: SpaceGrid
    time: TimeGrid
    f: np.ndarray
    r: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "f", _frozen_array(self.f, (self.space.n_nodes,), "f"))
        shape = (self.time.n_levels, self.space.n_nodes)
        object.__setattr__(self, "r", _frozen_array(_broadcast(self.r, shape, "r"), shape, "r"))

    @property
    def F(self) -> np.ndarray:
        return self.f[np.newaxis, :] * self.r

    def with_f(self, f: np.ndarray) -> "SeparableSource":
        return SeparableSource(self.space, self.time, f, self.r)

    def to_pair(self) -> SourcePair:
        return SourcePair(self.space, self.time, self.F, np.zeros(self.time.n_levels))


@dataclass(frozen=True, eq=False)
class GroundTruth:
    """Exact source and clean terminal data, known in synthetic experiments."""
    f_true: np.ndarray
    yT_clean: BoundaryField


class AdmissibleBox(BaseModel):
    """Bounds F_* <= F <= F^* and G_* <= G <= G^*; None means unbounded."""
    model_config = ConfigDict(frozen=True)

    F_min: Optional[float] = None
    F_max: Optional[float] = None
    G_min: Optional[float] = None
    G_max: Optional[float] = None

    @model_validator(mode="after")
    def _ordered(self) -> "AdmissibleBox":
        for lo, hi, name in ((self.F_min, self.F_max, "F"), (self.G_min, self.G_max, "G")):
            if lo is not None and hi is not None and lo > hi:
                raise ValueError(f"inverted bounds for {name}: {lo} > {hi}")
        return self

    @staticmethod
    def _limits(lo: Optional[float], hi: Optional[float]):
        return (-np.inf if lo is None else lo), (np.inf if hi is None else hi)

    def clip_F(self, values: np.ndarray) -> np.ndarray:
        return np.clip(values, *self._limits(self.F_min, self.F_max))

    def clip_G(self, values: np.ndarray) -> np.ndarray:
        return np.clip(values, *self._limits(self.G_min, self.G_max))


class OptimizerConfig(BaseModel):
    """Settings shared by the CG reconstruction and the gradient iteration."""
    model_config = ConfigDict(frozen=True)

    eps: float = Field(1e-8, ge=0.0, description="Tikhonov parameter")
    stop_tol: float = Field(1e-8, gt=0.0, description="stop once J_eps < stop_tol")
    max_iter: int = Field(40, ge=1)
    step_rule: StepRule = StepRule.CG
    alpha: Optional[float] = Field(None, gt=0.0, description="constant step for the fixed rule")
    box: Optional[AdmissibleBox] = None
    fletcher_reeves: bool = Field(True, description="False forces gamma_k = 0")
    discrepancy: float = Field(
        1.1, ge=0.0, description="tau; noisy data stop at J_eps < (tau delta)^2 / 2, 0 disables"
    )


@dataclass
class IterationRecord:
    """One line of an optimization log."""
    k: int
    J_eps: float
    grad_norm: float
    conv_error: Optional[float] = None
    acc_error: Optional[float] = None
    alpha: Optional[float] = None
    gamma: Optional[float] = None
    step_norm2: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "k": self.k,
            "J_eps": self.J_eps,
            "e": self.conv_error,
            "E": self.acc_error,
            "alpha": self.alpha,
            "gamma": self.gamma,
            "grad_norm": self.grad_norm,
            "step_norm2": self.step_norm2,
        }


@dataclass
class ReconstructionResult:
    """Final iterate, its log and the stopping reason."""
    solution: Union[np.ndarray, SourcePair]
    status: RunStatus
    records: List[IterationRecord] = field(default_factory=list)

    @property
    def iterations(self) -> int:
        return self.records[-1].k if self.records else 0

    @property
    def final_cost(self) -> float:
        return self.records[-1].J_eps if self.records else math.nan

    def to_dict(self) -> Dict[str, Any]:
        return {
            "status": self.status.value,
            "iterations": self.iterations,
            "final_cost": self.final_cost,
            "records": [record.to_dict() for record in self.records],
        }

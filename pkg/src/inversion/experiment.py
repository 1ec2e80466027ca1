"""
Synthetic reconstruction experiments.

Each example fixes an exact spatial source f on (0,1), synthesizes the
terminal displacement for F = f r with r = 1, T = 2 and zero initial data,
perturbs it with uniform noise and runs the CG reconstruction from f_0 = 0.
Runs over noise levels and seeds fan out on worker threads.
"""
from __future__ import annotations

import asyncio
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Union

import numpy as np

from ..config import config
from ..numerics.models import BoundaryField, InitialData, SpaceGrid, TimeGrid
from ..numerics.quadrature import l2_norm, norm_l2b
from .functional import lipschitz_constant, terminal_response
from .metrics import acc_error, conv_error, lagged_norm
from .models import (
    GroundTruth,
    Measurement,
    OptimizerConfig,
    ReconstructionResult,
    SeparableSource,
)
from .optimizer import cg_reconstruct

logger = logging.getLogger(__name__)

__all__ = [
    "EXAMPLES",
    "ExampleReport",
    "ExampleSetup",
    "NoiseRun",
    "acc_error",
    "add_noise",
    "conv_error",
    "derive_seed",
    "lagged_norm",
    "lipschitz_constant",
    "run_example",
    "run_example_async",
    "run_examples_async",
    "synthesize_measurement",
]

FINAL_TIME = 2.0
LENGTH = 1.0


@dataclass(frozen=True)
class ExampleSetup:
    """Exact source of one reproduction scenario and its published errors (k = 1..5)."""
    number: int
    formula: str
    source: Callable[[np.ndarray], np.ndarray]
    ref_e: Sequence[float]
    ref_E: Sequence[float]


EXAMPLES: Dict[int, ExampleSetup] = {
    1: ExampleSetup(
        1,
        "(sin(pi x) + sqrt(x)) / 2",
        lambda x: 0.5 * (np.sin(np.pi * x) + np.sqrt(x)),
        (7.547e-1, 4.217e-2, 3.447e-3, 3.445e-3, 2.108e-3),
        (2.015e-1, 1.747e-1, 1.746e-1, 6.744e-2, 1.526e-2),
    ),
    2: ExampleSetup(
        2,
        "2 pi x^2 (1 - x)",
        lambda x: 2.0 * np.pi * x**2 * (1.0 - x),
        (6.099e-1, 6.744e-2, 4.632e-3, 4.629e-3, 3.134e-3),
        (3.054e-1, 2.603e-1, 2.601e-1, 1.569e-1, 1.149e-1),
    ),
    3: ExampleSetup(
        3,
        "(arctan(x / pi) - sin(2 pi x)) / 4 + 1/2",
        lambda x: 0.25 * (np.arctan(x / np.pi) - np.sin(2.0 * np.pi * x)) + 0.5,
        (6.265e-1, 5.936e-2, 2.904e-4, 2.858e-4, 2.858e-4),
        (1.77e-1, 1.077e-1, 1.077e-1, 1.077e-1, 1.076e-1),
    ),
}


# ==================== Data synthesis ====================

def synthesize_measurement(
    f_true: np.ndarray,
    r: Union[float, np.ndarray],
    init: Optional[InitialData],
    space: SpaceGrid,
    time: TimeGrid,
) -> BoundaryField:
    """Clean terminal displacement Y(T,.) for F = f_true r and G = 0."""
    return terminal_response(f_true, r, init, space, time)


def derive_seed(seed: int, example: int, p: float) -> np.random.SeedSequence:
    """Independent stream per (seed, example, noise level)."""
    return np.random.SeedSequence([int(seed), int(example), int(round(p * 1e6))])


def add_noise(
    yT: BoundaryField,
    p: float,
    seed: int = 0,
    stream: Optional[np.random.SeedSequence] = None,
) -> Measurement:
    """Y_T^delta = Y_T + p ||Y_T|| xi with xi uniform on [-1, 1] per node.

    `stream` overrides `seed` as the generator source; `seed` is still recorded.
    The realized noise norm is kept as the measurement's delta.
    """
    if p < 0:
        raise ValueError(f"noise level must be >= 0, got {p}")
    if p == 0:
        return Measurement(yT, 0.0, seed)
    rng = np.random.default_rng(stream if stream is not None else seed)
    xi = rng.uniform(-1.0, 1.0, size=yT.space.n_nodes)
    noisy = BoundaryField(yT.space, yT.values + p * norm_l2b(yT) * xi)
    return Measurement(noisy, p, seed, delta=norm_l2b(noisy - yT))


def _restrict(field_: BoundaryField, space: SpaceGrid) -> BoundaryField:
    """Injection onto a coarser grid whose nodes are a subset of the fine ones."""
    factor, rem = divmod(field_.space.nx, space.nx)
    if rem or factor < 1:
        raise ValueError(f"nx={space.nx} does not divide nx={field_.space.nx}")
    return BoundaryField(space, field_.values[::factor])


# ==================== Reports ====================

@dataclass
class NoiseRun:
    """One reconstruction for a fixed noise level and seed."""
    noise_level: float
    seed: int
    result: ReconstructionResult
    rel_error: float
    delta: float = 0.0

    def error_row(self, k: int) -> Dict[str, Optional[float]]:
        """e, E and sqrt(e(k-1)) at iteration k; None past the last iterate."""
        records = self.result.records
        if k >= len(records):
            return {"e": None, "E": None, "e_prev": None}
        e = [record.conv_error for record in records]
        return {"e": e[k], "E": records[k].acc_error, "e_prev": lagged_norm(e)[k]}

    def to_dict(self) -> Dict[str, Any]:
        return {
            "noise_level": self.noise_level,
            "seed": self.seed,
            "delta": self.delta,
            "rel_error": self.rel_error,
            "solution": np.asarray(self.result.solution).tolist(),
            **self.result.to_dict(),
        }


@dataclass
class ExampleReport:
    """Everything one example produced, ordered by (noise level, seed)."""
    example: int
    space: SpaceGrid
    time: TimeGrid
    f_true: np.ndarray
    inverse_crime: bool
    runs: List[NoiseRun] = field(default_factory=list)

    @property
    def setup(self) -> ExampleSetup:
        return EXAMPLES[self.example]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "example": self.example,
            "formula": self.setup.formula,
            "nx": self.space.nx,
            "nt": self.time.nt,
            "inverse_crime": self.inverse_crime,
            "runs": [run.to_dict() for run in self.runs],
        }


# ==================== Runs ====================

def _grids(nx: Optional[int], cfl: Optional[float]):
    space = SpaceGrid(LENGTH, nx or config.default_nx)
    return space, TimeGrid.for_space(space, FINAL_TIME, cfl)


def _clean_data(f_fn, space: SpaceGrid, time: TimeGrid, fine_data: bool) -> BoundaryField:
    if not fine_data:
        return synthesize_measurement(f_fn(space.nodes), 1.0, None, space, time)
    fine_space = space.refine(2)
    fine_time = TimeGrid(time.T, 2 * time.nt)
    fine = synthesize_measurement(f_fn(fine_space.nodes), 1.0, None, fine_space, fine_time)
    return _restrict(fine, space)


def _reconstruct(
    example: int,
    p: float,
    seed: int,
    yT_clean: BoundaryField,
    f_true: np.ndarray,
    time: TimeGrid,
    cfg: OptimizerConfig,
) -> NoiseRun:
    space = yT_clean.space
    logger.info("example %d: start p=%g seed=%d", example, p, seed)
    meas = add_noise(yT_clean, p, seed, derive_seed(seed, example, p))
    s0 = SeparableSource(space, time, np.zeros(space.n_nodes), 1.0)
    result = cg_reconstruct(s0, None, meas, cfg, GroundTruth(f_true, yT_clean))
    scale = l2_norm(f_true, space.dx)
    rel = acc_error(result.solution, f_true, space) / scale if scale > 0 else math.nan
    logger.info(
        "example %d: done p=%g seed=%d status=%s k=%d rel_error=%.4e",
        example, p, seed, result.status.value, result.iterations, rel,
    )
    return NoiseRun(p, seed, result, rel, meas.delta or 0.0)


async def _run_example(
    n: int,
    noise_levels: Iterable[float],
    seeds: Iterable[int],
    cfg: Optional[OptimizerConfig],
    nx: Optional[int],
    cfl: Optional[float],
    fine_data: bool,
    gate: asyncio.Semaphore,
) -> ExampleReport:
    if n not in EXAMPLES:
        raise ValueError(f"unknown example {n}; choose from {sorted(EXAMPLES)}")
    cfg = cfg or OptimizerConfig()
    setup = EXAMPLES[n]
    space, time = _grids(nx, cfl)
    f_true = setup.source(space.nodes)
    yT_clean = await asyncio.to_thread(_clean_data, setup.source, space, time, fine_data)

    jobs = sorted({(float(p), int(s)) for p in noise_levels for s in seeds})

    async def job(p: float, seed: int) -> NoiseRun:
        async with gate:
            return await asyncio.to_thread(_reconstruct, n, p, seed, yT_clean, f_true, time, cfg)

    runs = await asyncio.gather(*(job(p, seed) for p, seed in jobs))
    return ExampleReport(n, space, time, f_true, not fine_data, list(runs))


async def run_example_async(
    n: int,
    noise_levels: Iterable[float] = (0.0,),
    seeds: Iterable[int] = (0,),
    cfg: Optional[OptimizerConfig] = None,
    nx: Optional[int] = None,
    cfl: Optional[float] = None,
    fine_data: bool = False,
    workers: Optional[int] = None,
) -> ExampleReport:
    """Reconstruct example `n` for every (noise level, seed) pair concurrently."""
    gate = asyncio.Semaphore(workers or config.workers)
    return await _run_example(n, noise_levels, seeds, cfg, nx, cfl, fine_data, gate)


async def run_examples_async(
    examples: Iterable[int],
    noise_levels: Iterable[float] = (0.0,),
    seeds: Iterable[int] = (0,),
    cfg: Optional[OptimizerConfig] = None,
    nx: Optional[int] = None,
    cfl: Optional[float] = None,
    fine_data: bool = False,
    workers: Optional[int] = None,
) -> List[ExampleReport]:
    """All requested examples, sharing one worker budget."""
    noise_levels, seeds = list(noise_levels), list(seeds)
    gate = asyncio.Semaphore(workers or config.workers)
    reports = await asyncio.gather(
        *(
            _run_example(n, noise_levels, seeds, cfg, nx, cfl, fine_data, gate)
            for n in sorted(set(examples))
        )
    )
    return list(reports)


def run_example(
    n: int,
    noise_levels: Iterable[float] = (0.0,),
    seeds: Iterable[int] = (0,),
    cfg: Optional[OptimizerConfig] = None,
    nx: Optional[int] = None,
    cfl: Optional[float] = None,
    fine_data: bool = False,
    workers: Optional[int] = None,
) -> ExampleReport:
    """Blocking wrapper around `run_example_async`."""
    return asyncio.run(
        run_example_async(n, noise_levels, seeds, cfg, nx, cfl, fine_data, workers)
    )

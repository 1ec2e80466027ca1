"""Command Definitions and Handlers."""
from __future__ import annotations

import asyncio
import logging
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

import numpy as np
from pydantic import BaseModel, Field, ValidationError

from ..errors import ConfigError, ToleranceError
from ..inversion.diagnostics import gradient_check
from ..inversion.experiment import EXAMPLES, ExampleReport, run_example_async
from ..inversion.models import Measurement, OptimizerConfig, SeparableSource
from ..inversion.optimizer import cg_reconstruct
from ..numerics.forward import solve_forward
from ..numerics.models import (
    BoundaryField,
    BoundaryForcing,
    InitialData,
    SpaceGrid,
    TimeGrid,
    Trajectory,
)
from .figures import plot_error_history, plot_reconstruction
from .run_config import RunConfig
from .tables import read_measurement, write_field, write_json, write_table

logger = logging.getLogger(__name__)

RECORD_COLUMNS = ["k", "J_eps", "e", "E", "alpha", "gamma", "grad_norm"]


# ==================== Command Schema ====================

class CommandArgument(BaseModel):
    """One command-specific argument."""
    name: str
    help: str
    kind: Literal["int", "path", "flag"] = "path"
    positional: bool = False
    required: bool = False
    choices: Optional[List[int]] = None


class CommandSpec(BaseModel):
    """Command definition."""
    name: str
    description: str
    arguments: List[CommandArgument] = Field(default_factory=list)


_CONFIG_ARG = CommandArgument(name="config", help="INI run configuration", positional=True)


# ==================== Command Definitions ====================

COMMANDS: List[CommandSpec] = [
    CommandSpec(
        name="forward",
        description="Run one forward solve and write trajectory snapshots and the terminal field.",
        arguments=[_CONFIG_ARG],
    ),
    CommandSpec(
        name="gradcheck",
        description=(
            "Compare the adjoint gradient with central differences across the mesh levels "
            "of the [check] section; exit 3 when the tolerance is violated."
        ),
        arguments=[_CONFIG_ARG],
    ),
    CommandSpec(
        name="example",
        description="Reproduce a synthetic reconstruction example with CSV tables and SVG plots.",
        arguments=[
            CommandArgument(
                name="n", help="example number", kind="int", positional=True, choices=[1, 2, 3]
            ),
            CommandArgument(name="config", help="optional INI run configuration"),
            CommandArgument(
                name="fine_data",
                help="synthesize data on a twice finer grid (avoids the inverse crime)",
                kind="flag",
            ),
        ],
    ),
    CommandSpec(
        name="invert",
        description="Recover the spatial source from a measured terminal displacement CSV.",
        arguments=[_CONFIG_ARG],
    ),
]


# ==================== Output bookkeeping ====================

class OutputSet:
    """Files written by one command; removed again if the command fails."""

    def __init__(self, directory: Path):
        self.directory = Path(directory)
        self.paths: List[Path] = []

    def path(self, name: str) -> Path:
        path = self.directory / name
        self.paths.append(path)
        return path

    def __enter__(self) -> "OutputSet":
        self.directory.mkdir(parents=True, exist_ok=True)
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        if exc_type is None:
            return
        for path in self.paths:
            path.unlink(missing_ok=True)
        logger.info("removed %d partial outputs after %s", len(self.paths), exc_type.__name__)


def _percent(p: float) -> str:
    return f"{100.0 * p:g}"


def _grids(cfg: RunConfig):
    space = SpaceGrid(cfg.grid.l, cfg.grid.nx)
    return space, TimeGrid.for_space(space, cfg.grid.T, cfg.grid.cfl)


def _optimizer(cfg: RunConfig) -> OptimizerConfig:
    try:
        return cfg.optimizer.to_optimizer()
    except ValidationError as exc:
        raise ConfigError(f"[optimizer]: {exc}") from exc


def _forward_problem(cfg: RunConfig, space: SpaceGrid, time: TimeGrid):
    """(F, boundary forcing, initial data, exact terminal field or None, tolerance)."""
    kind = cfg.source.kind
    if kind == "zero":
        return 0.0, None, None, None, None
    if kind == "quadratic":
        # y = t^2/2 is reproduced up to roundoff
        exact = np.full(space.n_nodes, 0.5 * time.T**2)
        return 1.0, BoundaryForcing(time, 1.0, 1.0), None, exact, 1e-10 * max(1.0, time.T**2)
    if kind == "cosine":
        wave = np.pi / space.l
        g = wave**2 * np.cos(wave * time.times)
        init = InitialData(
            BoundaryField.from_function(space, lambda x: np.cos(wave * x)),
            BoundaryField.zeros(space),
        )
        exact = np.cos(wave * space.nodes) * np.cos(wave * time.T)
        tolerance = 100.0 * (wave * max(space.dx, time.dt)) ** 2
        return 0.0, BoundaryForcing(time, -g, g), init, exact, tolerance
    f = EXAMPLES[cfg.source.example].source(space.nodes) * cfg.source.r
    return np.broadcast_to(f, (time.n_levels, space.n_nodes)), None, None, None, None


def _snapshot_rows(traj: Trajectory, count: int):
    levels = np.unique(np.linspace(0, traj.time.nt, count).round().astype(int))
    x = traj.space.nodes
    for n in levels:
        t = traj.time.times[n]
        for xi, value in zip(x, traj.y[n]):
            yield {"n": int(n), "t": t, "x": xi, "value": value}


def _record_rows(records, **prefix):
    for record in records:
        row = record.to_dict()
        yield {**prefix, **{key: row[key] for key in RECORD_COLUMNS}}


# ==================== Command Executor ====================

class CommandExecutor:
    """Executes CLI commands for one run configuration."""

    def __init__(self, run_config: RunConfig):
        """
        Initialize executor.

        Args:
            run_config: validated configuration with command-line overrides applied
        """
        self.cfg = run_config

    async def execute(self, command: str, args: Dict[str, Any]) -> List[Path]:
        """
        Execute a command and return the files it wrote.

        Args:
            command: Name of the command to execute
            args: Parsed command-line arguments
        """
        handler = getattr(self, f"_handle_{command}", None)
        if handler:
            return await handler(args)
        raise ValueError(f"Unknown command: {command}")

    async def _handle_forward(self, args: Dict[str, Any]) -> List[Path]:
        """Forward solve to CSV."""
        space, time = _grids(self.cfg)
        F, bc, init, exact, tolerance = _forward_problem(self.cfg, space, time)
        traj = await asyncio.to_thread(solve_forward, space, time, F, bc, init)

        with OutputSet(self.cfg.output.dir) as out:
            extra = {}
            if exact is not None:
                error = np.abs(traj.terminal.values - exact)
                extra = {
                    "exact": exact,
                    "error": error,
                    "tolerance": np.full_like(error, tolerance),
                }
            write_field(out.path("terminal.csv"), traj.terminal, **extra)
            write_table(
                out.path("snapshots.csv"),
                _snapshot_rows(traj, self.cfg.output.snapshots),
                ["n", "t", "x", "value"],
            )
        return out.paths

    async def _handle_gradcheck(self, args: Dict[str, Any]) -> List[Path]:
        """Adjoint vs. finite-difference gradient report."""
        check = self.cfg.check
        result = await asyncio.to_thread(
            gradient_check,
            check.levels,
            self.cfg.grid.T,
            self.cfg.grid.l,
            self.cfg.grid.cfl,
            check.seed,
            check.h,
            check.zero_residual,
        )
        with OutputSet(self.cfg.output.dir) as out:
            write_table(
                out.path("gradcheck.csv"),
                result.to_dict()["levels"],
                ["nx", "nt", "adjoint", "fd", "rel_error", "order"],
            )
        problems = result.violations(check.tolerance, check.min_ratio)
        if problems:
            raise ToleranceError("; ".join(problems))
        return out.paths

    async def _handle_example(self, args: Dict[str, Any]) -> List[Path]:
        """Reproduce one synthetic example."""
        n = int(args["n"])
        percents = args.get("noise") or [self.cfg.data.noise]
        report = await run_example_async(
            n,
            [p / 100.0 for p in percents],
            [self.cfg.data.seed],
            _optimizer(self.cfg),
            self.cfg.grid.nx,
            self.cfg.grid.cfl,
            bool(args.get("fine_data")),
        )
        with OutputSet(self.cfg.output.dir) as out:
            self._write_example(out, report)
        return out.paths

    def _write_example(self, out: OutputSet, report: ExampleReport) -> None:
        n = report.example
        setup = report.setup
        iterations, summary, runs = [], [], []
        for run in report.runs:
            key = {"noise_pct": 100.0 * run.noise_level, "seed": run.seed}
            iterations.extend(_record_rows(run.result.records, **key))
            for k, (ref_e, ref_E) in enumerate(zip(setup.ref_e, setup.ref_E), start=1):
                summary.append({**key, "k": k, **run.error_row(k), "ref_e": ref_e, "ref_E": ref_E})
            runs.append(
                {
                    **key,
                    "status": run.result.status.value,
                    "iterations": run.result.iterations,
                    "final_J": run.result.final_cost,
                    "delta": run.delta,
                    "rel_error": run.rel_error,
                    "inverse_crime": report.inverse_crime,
                    "nx": report.space.nx,
                    "nt": report.time.nt,
                }
            )
        base = f"example{n}"
        write_table(
            out.path(f"{base}_iterations.csv"), iterations, ["noise_pct", "seed", *RECORD_COLUMNS]
        )
        write_table(
            out.path(f"{base}_summary.csv"),
            summary,
            ["noise_pct", "seed", "k", "e", "E", "e_prev", "ref_e", "ref_E"],
        )
        write_table(
            out.path(f"{base}_runs.csv"),
            runs,
            [
                "noise_pct",
                "seed",
                "status",
                "iterations",
                "final_J",
                "delta",
                "rel_error",
                "inverse_crime",
                "nx",
                "nt",
            ],
        )
        for run in report.runs:
            name = f"{base}_p{_percent(run.noise_level)}_s{run.seed}.svg"
            plot_reconstruction(out.path(name), report, run)
        plot_error_history(out.path(f"{base}_errors.svg"), report, report.runs)
        write_json(out.path(f"{base}_report.json"), report.to_dict())

    async def _handle_invert(self, args: Dict[str, Any]) -> List[Path]:
        """CG reconstruction from a measurement file."""
        if self.cfg.data.measurement is None:
            raise ConfigError("[data] measurement is required for invert")
        space, time = _grids(self.cfg)
        yT = read_measurement(self.cfg.data.measurement, space)
        meas = Measurement(yT, 0.0, self.cfg.data.seed, delta=self.cfg.data.delta)
        s0 = SeparableSource(space, time, np.zeros(space.n_nodes), self.cfg.source.r)
        result = await asyncio.to_thread(cg_reconstruct, s0, None, meas, _optimizer(self.cfg))

        with OutputSet(self.cfg.output.dir) as out:
            write_field(out.path("recovered.csv"), BoundaryField(space, result.solution))
            write_table(out.path("iterations.csv"), _record_rows(result.records), RECORD_COLUMNS)
        logger.info("invert: %s after %d iterations", result.status.value, result.iterations)
        return out.paths

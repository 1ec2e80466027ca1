"""Exception hierarchy shared by solvers, optimizers and the CLI."""
from __future__ import annotations

from typing import Optional


class WaveISPError(Exception):
    """Base class for all toolkit errors."""


class GridMismatchError(WaveISPError, ValueError):
    """Arrays or fields do not live on the expected grid."""


class CFLViolationError(WaveISPError, ValueError):
    """The time step violates the configured CFL cap."""

    def __init__(self, courant: float, cfl_max: float):
        super().__init__(f"courant number {courant:.6g} exceeds cfl_max={cfl_max:.6g}")
        self.courant = courant
        self.cfl_max = cfl_max


class SolverBlowUpError(WaveISPError, ArithmeticError):
    """The discrete state became non-finite."""

    def __init__(self, step: int):
        super().__init__(f"non-finite displacement at time step {step}")
        self.step = step


class StagnationError(WaveISPError, ArithmeticError):
    """The CG relaxation parameter cannot be formed."""


class ConfigError(WaveISPError, ValueError):
    """A run configuration is missing, unreadable or invalid."""


class DataError(WaveISPError, ValueError):
    """Measurement data is empty or malformed."""

    def __init__(self, message: str, row: Optional[int] = None):
        super().__init__(message if row is None else f"{message} (row {row})")
        self.row = row


class ToleranceError(WaveISPError):
    """A verification check exceeded its acceptance tolerance."""

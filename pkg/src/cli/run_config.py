"""INI run configurations parsed into validated models.

A run configuration is a flat ``key = value`` file with optional sections::

    [grid]
    nx = 100
    cfl = 0.9

    [source]
    kind = example
    example = 1

    [data]
    measurement = measured.csv
    noise = 1          ; percent
    seed = 7
    delta = 0.004      ; noise norm bound, enables the noise-floor stop

Unknown sections or keys are rejected.
"""
from __future__ import annotations

import configparser
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from ..config import config
from ..errors import ConfigError
from ..inversion.models import AdmissibleBox, OptimizerConfig


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class GridSection(_Section):
    l: float = Field(1.0, gt=0.0)
    T: float = Field(2.0, gt=0.0)
    nx: int = Field(default_factory=lambda: config.default_nx, ge=4)
    cfl: float = Field(default_factory=lambda: config.cfl_max, gt=0.0)


class SourceSection(_Section):
    kind: Literal["zero", "quadratic", "cosine", "example"] = "zero"
    example: int = Field(1, ge=1, le=3)
    r: float = Field(1.0, description="constant modulation of the separable source")


class DataSection(_Section):
    measurement: Optional[Path] = None
    noise: float = Field(0.0, ge=0.0, description="noise level in percent")
    seed: int = 0
    delta: Optional[float] = Field(None, ge=0.0, description="bound on the measurement noise norm")


class OptimizerSection(_Section):
    eps: float = Field(1e-8, ge=0.0)
    stop_tol: float = Field(1e-8, gt=0.0)
    max_iter: int = Field(40, ge=1)
    fletcher_reeves: bool = True
    discrepancy: float = Field(1.1, ge=0.0)
    F_min: Optional[float] = None
    F_max: Optional[float] = None

    def to_optimizer(self) -> OptimizerConfig:
        box = None
        if self.F_min is not None or self.F_max is not None:
            box = AdmissibleBox(F_min=self.F_min, F_max=self.F_max)
        return OptimizerConfig(
            eps=self.eps,
            stop_tol=self.stop_tol,
            max_iter=self.max_iter,
            fletcher_reeves=self.fletcher_reeves,
            discrepancy=self.discrepancy,
            box=box,
        )


class CheckSection(_Section):
    levels: List[int] = Field(default_factory=lambda: [50, 100, 200])
    tolerance: float = Field(1e-2, gt=0.0)
    min_ratio: float = Field(1.5, gt=0.0)
    h: float = Field(1e-4, gt=0.0)
    seed: int = 0
    zero_residual: bool = False

    @field_validator("levels", mode="before")
    @classmethod
    def _split(cls, value: Any) -> Any:
        if isinstance(value, str):
            return [item.strip() for item in value.split(",") if item.strip()]
        return value

    @field_validator("levels")
    @classmethod
    def _increasing(cls, value: List[int]) -> List[int]:
        if not value or any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError("levels must be a non-empty increasing list")
        return value


class OutputSection(_Section):
    dir: Path = Path("out")
    snapshots: int = Field(5, ge=2)


class RunConfig(_Section):
    """A full run configuration; every section is optional."""
    grid: GridSection = Field(default_factory=GridSection)
    source: SourceSection = Field(default_factory=SourceSection)
    data: DataSection = Field(default_factory=DataSection)
    optimizer: OptimizerSection = Field(default_factory=OptimizerSection)
    check: CheckSection = Field(default_factory=CheckSection)
    output: OutputSection = Field(default_factory=OutputSection)

    def with_overrides(self, overrides: Dict[str, Dict[str, Any]]) -> "RunConfig":
        """Copy with command-line values laid over the file values."""
        data = self.model_dump()
        for section, values in overrides.items():
            data[section].update({k: v for k, v in values.items() if v is not None})
        return _validate(data, "<command line>")


def _validate(data: Dict[str, Any], origin: str) -> RunConfig:
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in exc.errors()
        )
        raise ConfigError(f"{origin}: {problems}") from exc


def load_run_config(path: Optional[Path]) -> RunConfig:
    """Parse an INI run configuration; None gives the defaults."""
    if path is None:
        return RunConfig()
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"configuration file not found: {path}")
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    parser.optionxform = str  # keep F_min / T as written
    try:
        parser.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from exc

    data: Dict[str, Any] = {name: dict(parser.items(name)) for name in parser.sections()}
    measurement = data.get("data", {}).get("measurement")
    if measurement and not Path(measurement).is_absolute():
        data["data"]["measurement"] = str(path.parent / measurement)
    return _validate(data, str(path))

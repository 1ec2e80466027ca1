"""Shared fixtures: grids, seeded generators and run-configuration files."""
from pathlib import Path
from typing import Callable

import numpy as np
import pytest

from src.inversion.diagnostics import smooth_random_source
from src.numerics.models import SourcePair, SpaceGrid, TimeGrid


@pytest.fixture
def space() -> SpaceGrid:
    return SpaceGrid(1.0, 100)


@pytest.fixture
def time(space: SpaceGrid) -> TimeGrid:
    return TimeGrid.for_space(space, 2.0)


@pytest.fixture
def coarse_space() -> SpaceGrid:
    return SpaceGrid(1.0, 50)


@pytest.fixture
def coarse_time(coarse_space: SpaceGrid) -> TimeGrid:
    return TimeGrid.for_space(coarse_space, 2.0)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def smooth_source(space: SpaceGrid, time: TimeGrid, rng: np.random.Generator) -> SourcePair:
    return smooth_random_source(space, time, rng)


@pytest.fixture
def write_config(tmp_path: Path) -> Callable[..., Path]:
    """Write an INI run configuration into tmp_path and return its path."""

    def _write(text: str, name: str = "run.ini") -> Path:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return _write

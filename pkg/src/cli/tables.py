"""CSV tables written and read by the command-line front end.

Floats are written with 17 significant digits and read back with the
round-trip parser, so a table re-ingests bit-exactly.
"""
from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List

import numpy as np
import pandas as pd

from ..errors import DataError, GridMismatchError
from ..numerics.models import BoundaryField, SpaceGrid

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


def write_table(path: Path, rows: Iterable[Dict[str, Any]], columns: List[str]) -> Path:
    """Write rows (dicts) with a fixed column order; None becomes an empty cell."""
    frame = pd.DataFrame(list(rows), columns=columns)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.info("wrote %s (%d rows)", path, len(frame))
    return path


def write_field(path: Path, field: BoundaryField, **extra: np.ndarray) -> Path:
    """Nodal field as columns x, value plus any extra per-node columns."""
    data = {"x": field.space.nodes, "value": field.values}
    data.update({name: np.asarray(values) for name, values in extra.items()})
    frame = pd.DataFrame(data)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.info("wrote %s (%d nodes)", path, len(frame))
    return path


def write_json(path: Path, data: Dict[str, Any]) -> Path:
    """Run report as indented JSON; key order is kept as given."""
    path.write_text(json.dumps(data, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
    logger.info("wrote %s", path)
    return path


def read_table(path: Path) -> pd.DataFrame:
    return pd.read_csv(path, float_precision="round_trip")


def read_measurement(path: Path, space: SpaceGrid) -> BoundaryField:
    """Load an (x, value) measurement CSV sampled on `space`."""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"measurement file not found: {path}")
    try:
        frame = read_table(path)
    except pd.errors.EmptyDataError as exc:
        raise DataError(f"{path}: measurement file is empty") from exc
    except UnicodeDecodeError as exc:
        raise DataError(f"{path}: measurement file is not UTF-8 text") from exc
    except pd.errors.ParserError as exc:
        raise DataError(f"{path}: malformed CSV: {exc}") from exc
    if frame.empty:
        raise DataError(f"{path}: measurement file has no rows")
    if "value" not in frame.columns:
        raise DataError(f"{path}: missing 'value' column")

    values = pd.to_numeric(frame["value"], errors="coerce").to_numpy(dtype=float)
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        raise DataError(f"{path}: non-finite measurement value", row=int(bad[0]))
    if values.size != space.n_nodes:
        raise GridMismatchError(
            f"{path}: measurement has {values.size} rows but the grid with nx={space.nx} "
            f"needs {space.n_nodes}"
        )
    if "x" in frame.columns:
        x = pd.to_numeric(frame["x"], errors="coerce").to_numpy(dtype=float)
        if not np.allclose(x, space.nodes, rtol=0.0, atol=1e-9 * space.l):
            raise GridMismatchError(f"{path}: x column does not match the nodes of nx={space.nx}")
    return BoundaryField(space, values)

"""Convergence and accuracy errors of a reconstruction."""
from __future__ import annotations

import math
from typing import List, Optional, Sequence

import numpy as np

from ..errors import GridMismatchError
from ..numerics.models import BoundaryField, SpaceGrid
from ..numerics.quadrature import inner_l2b, l2_norm


def conv_error(state: BoundaryField, yT_clean: BoundaryField) -> float:
    """e(k) = ||Psi f_k - Y_T||^2 in L2(0,l) x R^2 (squared, clean data)."""
    diff = state - yT_clean
    return inner_l2b(diff, diff)


def acc_error(f_k: np.ndarray, f_true: np.ndarray, space: SpaceGrid) -> float:
    """E(k) = ||f - f_k||_{L2(0,l)}, without boundary terms."""
    f_k = np.asarray(f_k, dtype=float)
    f_true = np.asarray(f_true, dtype=float)
    if f_k.shape != f_true.shape or f_k.shape != (space.n_nodes,):
        raise GridMismatchError(f"shapes {f_k.shape} and {f_true.shape} do not match nx={space.nx}")
    return l2_norm(f_true - f_k, space.dx)


def lagged_norm(conv_errors: Sequence[Optional[float]]) -> List[Optional[float]]:
    """sqrt(e(k-1)) for k = 0, 1, ...; None where no previous value exists.

    The unsquared residual of the iterate that step k starts from, the
    convention convergence tables are usually printed in.
    """
    lagged: List[Optional[float]] = [None]
    lagged.extend(None if e is None else math.sqrt(e) for e in conv_errors[:-1])
    return lagged

"""Dense float64 matrix kernels.

Matrices are plain 2-D ``numpy.ndarray`` objects of dtype float64. The
helpers here never broadcast: every shape coercion is explicit so shape
mistakes surface as :class:`~synstrip.errors.ShapeError` instead of silently
producing a differently shaped result.
"""

from __future__ import annotations

import numpy as np

from .errors import ShapeError

DTYPE = np.float64


def as_matrix(data, *, copy: bool = False) -> np.ndarray:
    """Coerce ``data`` to a 2-D float64 array (rows x cols)."""
    arr = np.array(data, dtype=DTYPE, copy=copy) if copy else np.asarray(data, dtype=DTYPE)
    if arr.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got shape {arr.shape}")
    return arr


def zeros(rows: int, cols: int) -> np.ndarray:
    return np.zeros((rows, cols), dtype=DTYPE)


def ones(rows: int, cols: int) -> np.ndarray:
    return np.ones((rows, cols), dtype=DTYPE)


def _require_2d(*mats):
    for m in mats:
        if m.ndim != 2:
            raise ShapeError(f"expected a 2-D matrix, got shape {m.shape}")


def _require_same(a, b, op):
    _require_2d(a, b)
    if a.shape != b.shape:
        raise ShapeError(f"{op}: shape mismatch {a.shape} vs {b.shape}")


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product ``a @ b``; ``a.cols`` must equal ``b.rows``."""
    _require_2d(a, b)
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul: cannot multiply {a.shape} by {b.shape}")
    return a @ b


def hadamard(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    _require_same(a, b, "hadamard")
    return a * b


def add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    _require_same(a, b, "add")
    return a + b


def sub(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    _require_same(a, b, "sub")
    return a - b


def scale(a: np.ndarray, factor: float) -> np.ndarray:
    _require_2d(a)
    return a * DTYPE(factor)


def transpose(a: np.ndarray) -> np.ndarray:
    """Transposed view of ``a`` (no copy)."""
    _require_2d(a)
    return a.T


def add_row(a: np.ndarray, row: np.ndarray) -> np.ndarray:
    """Add the vector ``row`` to every row of ``a``."""
    _require_2d(a)
    if row.ndim != 1 or row.shape[0] != a.shape[1]:
        raise ShapeError(f"add_row: row of shape {row.shape} does not fit matrix {a.shape}")
    return a + row[np.newaxis, :]


def row_sum(a: np.ndarray) -> np.ndarray:
    """Sum each column over all rows, giving one value per column."""
    _require_2d(a)
    return a.sum(axis=0)


def argmax_rows(a: np.ndarray) -> np.ndarray:
    """Index of the largest entry in each row; ties go to the lowest index."""
    _require_2d(a)
    if a.shape[1] == 0:
        raise ShapeError("argmax_rows: matrix has no columns")
    return np.argmax(a, axis=1)

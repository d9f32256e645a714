"""Pure-numpy kernel backend (no compiled extension required)."""

from __future__ import annotations

import numpy as np


class CsrOp:
    """Matrix-vector products for a scipy CSR matrix."""

    def __init__(self, matrix):
        self._mat = matrix
        self._mat_t = matrix.T
        self.shape = matrix.shape

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return self._mat @ x

    def rmatvec(self, x: np.ndarray) -> np.ndarray:
        return self._mat_t @ x


def orthogonalize(basis: np.ndarray, nrows: int, v: np.ndarray) -> float:
    """Classical Gram-Schmidt of ``v`` against ``basis[:nrows]``, twice.

    ``v`` is modified in place; returns its final euclidean norm.
    """
    if nrows > 0:
        b = basis[:nrows]
        for _ in range(2):
            v -= b.T @ (b @ v)
    return float(np.linalg.norm(v))


def dense_matvec(mat: np.ndarray, x: np.ndarray) -> np.ndarray:
    return mat @ x

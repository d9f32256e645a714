"""Numerical inner loops with two interchangeable backends.

The compiled Cython module (``lsaqu.kernels._cy``) is preferred when it
built successfully; otherwise the pure-numpy implementation is used.
Setting the environment variable ``LSAQU_PURE_PYTHON=1`` forces the
fallback, which is also how the benchmark compares the two.

Both backends implement the same four operations with identical
semantics (summation order may differ at machine-epsilon level):

* ``CsrOp(matrix)`` with ``matvec(x)`` / ``rmatvec(x)`` for a scipy CSR
  matrix,
* ``orthogonalize(basis, nrows, v)``: twice-repeated classical
  Gram-Schmidt of ``v`` against the first ``nrows`` rows of ``basis``
  (in place), returning the final norm of ``v``,
* ``dense_matvec(mat, x)``: row-wise dot products.
"""

from __future__ import annotations

import os

from . import _numpy

_backends = {"numpy": _numpy}

try:
    from . import _cy

    _backends["cython"] = _cy
except ImportError:  # extension not built; fallback keeps everything working
    pass


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_backends))


def _default_backend() -> str:
    if os.environ.get("LSAQU_PURE_PYTHON", "") not in ("", "0"):
        return "numpy"
    return "cython" if "cython" in _backends else "numpy"


_active = _backends[_default_backend()]


def active_backend() -> str:
    for name, mod in _backends.items():
        if mod is _active:
            return name
    raise RuntimeError("no active kernel backend")


def select_backend(name: str) -> None:
    """Switch the active backend (used by tests and the benchmark)."""
    global _active
    if name not in _backends:
        raise ValueError(f"unknown backend {name!r} (available: {available_backends()})")
    _active = _backends[name]


def make_csr_op(matrix):
    return _active.CsrOp(matrix)


def orthogonalize(basis, nrows, v) -> float:
    return _active.orthogonalize(basis, nrows, v)


def dense_matvec(mat, x):
    return _active.dense_matvec(mat, x)

# cython: language_level=3
# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernel backend: CSR matvecs, Gram-Schmidt, dense matvec.

The sparse products are hand-written loops (they beat the generic scipy
path by skipping wrapper overhead); the dense operations go straight to
BLAS so they keep the fallback backend's throughput while avoiding the
temporaries that ``b.T @ (b @ v)`` allocates per call.
"""

import numpy as np

cimport numpy as cnp
from scipy.linalg.cython_blas cimport dgemv, dnrm2

ctypedef cnp.float64_t f64
ctypedef cnp.int64_t i64


cdef void _csr_matvec(const i64[::1] indptr, const i64[::1] indices,
                      const f64[::1] data, const f64[::1] x,
                      f64[::1] out) noexcept nogil:
    cdef Py_ssize_t i, jj
    cdef f64 acc
    for i in range(out.shape[0]):
        acc = 0.0
        for jj in range(indptr[i], indptr[i + 1]):
            acc += data[jj] * x[indices[jj]]
        out[i] = acc


cdef void _csr_rmatvec(const i64[::1] indptr, const i64[::1] indices,
                       const f64[::1] data, const f64[::1] x,
                       f64[::1] out) noexcept nogil:
    cdef Py_ssize_t i, jj
    cdef f64 xi
    for i in range(out.shape[0]):
        out[i] = 0.0
    for i in range(x.shape[0]):
        xi = x[i]
        if xi != 0.0:
            for jj in range(indptr[i], indptr[i + 1]):
                out[indices[jj]] += data[jj] * xi


class CsrOp:
    """Matrix-vector products for a scipy CSR matrix."""

    def __init__(self, matrix):
        self._indptr = np.ascontiguousarray(matrix.indptr, dtype=np.int64)
        self._indices = np.ascontiguousarray(matrix.indices, dtype=np.int64)
        self._data = np.ascontiguousarray(matrix.data, dtype=np.float64)
        self.shape = matrix.shape

    def matvec(self, x):
        out = np.empty(self.shape[0])
        _csr_matvec(self._indptr, self._indices, self._data,
                    np.ascontiguousarray(x, dtype=np.float64), out)
        return out

    def rmatvec(self, x):
        out = np.empty(self.shape[1])
        _csr_rmatvec(self._indptr, self._indices, self._data,
                     np.ascontiguousarray(x, dtype=np.float64), out)
        return out


def orthogonalize(const f64[:, ::1] basis, Py_ssize_t nrows, f64[::1] v):
    """Classical Gram-Schmidt of ``v`` against ``basis[:nrows]``, twice.

    ``v`` is modified in place; returns its final euclidean norm. A
    C-contiguous (nrows x dim) basis seen through Fortran eyes is its own
    transpose, so BLAS gemv computes both the coefficients (trans='T')
    and the subtraction (trans='N') without copying anything.
    """
    cdef Py_ssize_t dim = v.shape[0]
    cdef f64[::1] coef
    cdef int m_, n_, inc = 1
    cdef f64 one = 1.0, minus = -1.0, zero = 0.0
    cdef char trans_t = b'T', trans_n = b'N'
    cdef Py_ssize_t p

    if nrows > 0 and dim > 0:
        coef = np.empty(nrows)
        m_ = <int> dim
        n_ = <int> nrows
        with nogil:
            for p in range(2):
                # coef = basis[:nrows] @ v
                dgemv(&trans_t, &m_, &n_, &one, <f64*> &basis[0, 0], &m_,
                      &v[0], &inc, &zero, &coef[0], &inc)
                # v -= basis[:nrows].T @ coef
                dgemv(&trans_n, &m_, &n_, &minus, <f64*> &basis[0, 0], &m_,
                      &coef[0], &inc, &one, &v[0], &inc)

    if dim == 0:
        return 0.0
    m_ = <int> dim
    return float(dnrm2(&m_, &v[0], &inc))


def dense_matvec(const f64[:, ::1] mat, const f64[::1] x):
    cdef Py_ssize_t nrows = mat.shape[0]
    cdef Py_ssize_t ncols = mat.shape[1]
    out_arr = np.empty(nrows)
    cdef f64[::1] out = out_arr
    cdef int m_, n_, inc = 1
    cdef f64 one = 1.0, zero = 0.0
    cdef char trans_t = b'T'
    if nrows == 0:
        return out_arr
    if ncols == 0:
        out_arr[:] = 0.0
        return out_arr
    m_ = <int> ncols
    n_ = <int> nrows
    with nogil:
        dgemv(&trans_t, &m_, &n_, &one, <f64*> &mat[0, 0], &m_,
              <f64*> &x[0], &inc, &zero, &out[0], &inc)
    return out_arr

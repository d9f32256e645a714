"""Truncated SVD of the weighted term-document matrix.

The default solver is Golub-Kahan-Lanczos bidiagonalization with full
(twice-repeated classical Gram-Schmidt) reorthogonalization, restarted
with a fresh seeded random direction whenever the Krylov space breaks
down. Restarting is what lets it recover repeated singular values (the
Krylov space from a single start vector only ever sees one copy of a
multiple singular value) and sweep rank-deficient matrices completely.

A dense LAPACK path is available for small matrices via
``method="dense"``. Both paths apply the same deterministic sign
convention: the largest-magnitude entry of each left singular vector is
made positive.
"""

from __future__ import annotations

import logging

import numpy as np

from . import kernels
from .errors import ConvergenceError, DimensionError, EmptyMatrixError, SemanticsError
from .weighting import WEIGHTED, TermDocMatrix

logger = logging.getLogger(__name__)

_EPS = np.finfo(np.float64).eps

DEFAULT_TOL = 1e-10
DENSE_LIMIT = 2000


def _fix_signs(u: np.ndarray, v: np.ndarray | None) -> None:
    """Make the largest-magnitude entry of each column of ``u`` positive."""
    for j in range(u.shape[1]):
        col = u[:, j]
        if col[np.argmax(np.abs(col))] < 0:
            col *= -1.0
            if v is not None:
                v[:, j] *= -1.0


def _fresh_direction(rng, basis: np.ndarray, nrows: int, dim: int) -> np.ndarray | None:
    """A unit vector orthogonal to ``basis[:nrows]``, or None if the space
    is exhausted."""
    for _ in range(3):
        q = rng.standard_normal(dim)
        scale = np.linalg.norm(q)
        nrm = kernels.orthogonalize(basis, nrows, q)
        if nrm > 1e-6 * scale:
            q /= nrm
            return q
    return None


def _build_bidiagonal(alphas: list[float], betas: list[float], square: bool) -> np.ndarray:
    s = len(betas) if not square else len(alphas)
    b = np.zeros((s + (0 if square else 1), s))
    for i in range(s):
        b[i, i] = alphas[i]
    for i in range(len(betas) if square else s):
        if i + 1 < b.shape[0]:
            b[i + 1, i] = betas[i]
    return b


def _grow(arr: np.ndarray, new_cap: int) -> np.ndarray:
    out = np.zeros((new_cap, arr.shape[1]))
    out[: arr.shape[0]] = arr
    return out


def _check_interval(s: int) -> int:
    """How often to run the O(s^3) Ritz convergence check."""
    if s < 128:
        return 8
    if s < 512:
        return 32
    return 64


def _lanczos_bidiag(matvec, rmatvec, m, n, k, rng, tol, max_iter):
    """Top-k singular triplets of the operator (m >= n assumed by caller).

    Returns (U, sigma, V) with orthonormal columns and sigma descending;
    zero singular values (below the rank cutoff) are dropped, so fewer
    than k triplets may come back for rank-deficient input.
    """
    p = n
    if max_iter is None:
        max_iter = p  # a full sweep is exact; convergence exits far earlier
    max_iter = min(max_iter, p)
    # Don't accept convergence before the Krylov space has had a chance to
    # surface near-degenerate directions.
    min_steps = min(p, k + 4)

    cap = min(max_iter, max(2 * k + 16, 64)) + 1
    u_rows = np.zeros((cap, m))
    v_rows = np.zeros((cap, n))

    def ensure(rows_needed: int) -> None:
        nonlocal u_rows, v_rows, cap
        if rows_needed <= cap:
            return
        cap = min(max_iter + 1, max(rows_needed, 2 * cap))
        u_rows = _grow(u_rows, cap)
        v_rows = _grow(v_rows, cap)

    alphas: list[float] = []
    betas: list[float] = []

    u = rng.standard_normal(m)
    u /= np.linalg.norm(u)
    u_rows[0] = u

    anorm = 0.0  # running estimate of ||A||; breakdown cutoffs stay relative

    def breakdown_cutoff() -> float:
        return anorm * max(m, n) * _EPS

    r = rmatvec(u_rows[0])
    alpha = kernels.orthogonalize(v_rows, 0, r)
    if alpha > 0.0:
        v_rows[0] = r / alpha
        alphas.append(alpha)
        anorm = alpha
    else:
        fresh = _fresh_direction(rng, v_rows, 0, n)
        if fresh is None:
            raise EmptyMatrixError("operator has an empty row space")
        v_rows[0] = fresh
        alphas.append(0.0)

    square_b = False  # left space exhausted: B ends square, residual is zero
    exhausted = False

    def ritz():
        """SVD of the small bidiagonal matrix; returns (P, theta, Qt, resid)."""
        b = _build_bidiagonal(alphas, betas, square_b)
        pmat, theta, qt = np.linalg.svd(b, full_matrices=False)
        if square_b or alphas[-1] == 0.0:
            resid = np.zeros_like(theta)
        else:
            resid = alphas[-1] * np.abs(pmat[-1, : theta.shape[0]])
        return pmat, theta, qt, resid

    steps_done = 0
    converged = False
    while steps_done < max_iter:
        j = steps_done
        ensure(j + 2)
        # Next left vector: orthogonalize A v_j against everything so far.
        pvec = matvec(v_rows[j])
        beta = kernels.orthogonalize(u_rows, j + 1, pvec)
        if beta > breakdown_cutoff():
            u_rows[j + 1] = pvec / beta
            betas.append(beta)
        else:
            fresh = _fresh_direction(rng, u_rows, j + 1, m)
            if fresh is None:
                square_b = True
                exhausted = True
                break
            u_rows[j + 1] = fresh
            betas.append(0.0)

        # Next right vector from A^T u_{j+1}.
        r = rmatvec(u_rows[j + 1])
        alpha = kernels.orthogonalize(v_rows, j + 1, r)
        if alpha > breakdown_cutoff():
            v_rows[j + 1] = r / alpha
            alphas.append(alpha)
        else:
            fresh = _fresh_direction(rng, v_rows, j + 1, n)
            if fresh is None:
                alphas.append(0.0)
                exhausted = True
                steps_done += 1
                break
            v_rows[j + 1] = fresh
            alphas.append(0.0)

        anorm = max(anorm, alphas[-1], betas[-1])
        steps_done += 1

        s = steps_done
        if s >= min_steps and (s % _check_interval(s) == 0 or s == max_iter):
            _, theta, _, resid = ritz()
            need = min(k, theta.shape[0])
            if np.all(resid[:need] <= tol * max(theta[0], 1e-300)):
                converged = True
                break

    pmat, theta, qt, resid = ritz()
    if exhausted:
        converged = True
    if not converged:
        need = min(k, theta.shape[0])
        if np.all(resid[:need] <= tol * max(theta[0], 1e-300)):
            converged = True
    if not converged:
        raise ConvergenceError(
            f"singular values not converged to {tol:g} after {steps_done} steps; "
            "raise max_iter"
        )

    if theta.size == 0 or theta[0] == 0.0:
        raise EmptyMatrixError("matrix has no nonzero singular value")
    rank_cutoff = theta[0] * max(m, n) * _EPS
    kept = int(np.sum(theta > rank_cutoff))
    kk = min(k, kept)

    n_u = len(alphas) if square_b else len(betas) + 1
    n_v = len(alphas) if square_b else len(betas)
    u_out = (pmat[:, :kk].T @ u_rows[:n_u]).T
    v_out = (qt[:kk] @ v_rows[:n_v]).T
    return np.ascontiguousarray(u_out), theta[:kk].copy(), np.ascontiguousarray(v_out)


def _verify_triplets(matvec, rmatvec, u, sigma, v, tol):
    """Explicit residual check on the returned triplets (cheap: 2k matvecs)."""
    if sigma.size == 0:
        return
    top = sigma[0]
    for i in range(sigma.shape[0]):
        r1 = np.linalg.norm(matvec(v[:, i]) - sigma[i] * u[:, i])
        r2 = np.linalg.norm(rmatvec(u[:, i]) - sigma[i] * v[:, i])
        if max(r1, r2) > 100.0 * tol * top:
            raise ConvergenceError(
                f"triplet {i} failed the residual check ({max(r1, r2):.3e} "
                f"> {100.0 * tol * top:.3e})"
            )


def truncated_svd(
    weighted: TermDocMatrix,
    k: int,
    *,
    seed: int = 42,
    method: str = "lanczos",
    tol: float = DEFAULT_TOL,
    max_iter: int | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Top-k singular triplets (U_k, sigma_k, V_k) of the weighted matrix.

    U_k is n_terms x k', sigma_k descending and strictly positive, V_k is
    n_docs x k'. k' < k happens only when the numerical rank is below k,
    and is logged. Fully deterministic for a given seed.
    """
    if weighted.semantics != WEIGHTED:
        raise SemanticsError(f"expected a {WEIGHTED} matrix, got {weighted.semantics}")
    m, n = weighted.matrix.shape
    if not 1 <= k <= min(m, n):
        raise DimensionError(f"k={k} outside 1..min(n_terms={m}, n_docs={n})")
    if weighted.matrix.nnz == 0:
        raise EmptyMatrixError("weighted matrix has no nonzero entry")
    if method not in ("lanczos", "dense"):
        raise ValueError(f"unknown SVD method {method!r}")

    if method == "dense":
        if max(m, n) > DENSE_LIMIT:
            raise DimensionError(
                f"dense SVD limited to {DENSE_LIMIT}x{DENSE_LIMIT} matrices"
            )
        full_u, full_s, full_vt = np.linalg.svd(
            weighted.matrix.toarray(), full_matrices=False
        )
        rank_cutoff = full_s[0] * max(m, n) * _EPS
        kk = min(k, int(np.sum(full_s > rank_cutoff)))
        u, sigma, v = full_u[:, :kk], full_s[:kk].copy(), full_vt[:kk].T
    else:
        op = kernels.make_csr_op(weighted.matrix.tocsr())
        rng = np.random.default_rng(seed)
        if m >= n:
            u, sigma, v = _lanczos_bidiag(
                op.matvec, op.rmatvec, m, n, k, rng, tol, max_iter
            )
        else:
            v, sigma, u = _lanczos_bidiag(
                op.rmatvec, op.matvec, n, m, k, rng, tol, max_iter
            )
        _verify_triplets(op.matvec, op.rmatvec, u, sigma, v, tol)

    if sigma.shape[0] < k:
        logger.warning(
            "rank %d below requested k=%d; returning %d singular triplets",
            sigma.shape[0], k, sigma.shape[0],
        )
    u = np.ascontiguousarray(u)
    v = np.ascontiguousarray(v)
    _fix_signs(u, v)
    return u, sigma, v

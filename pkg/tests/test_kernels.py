"""Backend parity: the compiled kernels must match the numpy fallback."""

from __future__ import annotations

import subprocess
import sys

import numpy as np
import pytest

from lsaqu import kernels

from .conftest import random_sparse

HAS_CYTHON = "cython" in kernels.available_backends()

needs_cython = pytest.mark.skipif(
    not HAS_CYTHON, reason="compiled kernel extension not built"
)


@pytest.fixture(autouse=True)
def restore_backend():
    before = kernels.active_backend()
    yield
    kernels.select_backend(before)


class TestBackendSelection:
    def test_cython_extension_is_built(self):
        # The binary backend is part of the build; its absence in CI would
        # silently benchmark numpy against itself.
        assert HAS_CYTHON

    def test_numpy_always_available(self):
        assert "numpy" in kernels.available_backends()

    def test_select_and_report(self):
        kernels.select_backend("numpy")
        assert kernels.active_backend() == "numpy"

    def test_unknown_backend_raises(self):
        with pytest.raises(ValueError, match="unknown backend"):
            kernels.select_backend("fortran")

    def test_pure_python_env_forces_numpy(self):
        code = (
            "import lsaqu.kernels as k; print(k.active_backend())"
        )
        out = subprocess.run(
            [sys.executable, "-c", code],
            capture_output=True,
            text=True,
            env={"PATH": "/usr/bin:/bin", "LSAQU_PURE_PYTHON": "1"},
            check=True,
        )
        assert out.stdout.strip() == "numpy"


@needs_cython
class TestParity:
    def both(self, fn):
        kernels.select_backend("numpy")
        a = fn()
        kernels.select_backend("cython")
        b = fn()
        return a, b

    def test_csr_matvec(self):
        rng = np.random.default_rng(0)
        mat = random_sparse(rng, 40, 25, 0.15)
        x = rng.standard_normal(25)
        y = rng.standard_normal(40)
        got_m, exp_m = self.both(lambda: kernels.make_csr_op(mat).matvec(x))
        np.testing.assert_allclose(got_m, exp_m, atol=1e-12)
        np.testing.assert_allclose(got_m, mat @ x, atol=1e-12)
        got_r, exp_r = self.both(lambda: kernels.make_csr_op(mat).rmatvec(y))
        np.testing.assert_allclose(got_r, exp_r, atol=1e-12)
        np.testing.assert_allclose(got_r, mat.T @ y, atol=1e-12)

    def test_orthogonalize(self):
        rng = np.random.default_rng(1)
        q, _ = np.linalg.qr(rng.standard_normal((12, 5)))
        basis = np.ascontiguousarray(q.T)  # 5 orthonormal rows
        v0 = rng.standard_normal(12)

        def run():
            v = v0.copy()
            norm = kernels.orthogonalize(basis, 5, v)
            return norm, v

        (n1, v1), (n2, v2) = self.both(run)
        assert n1 == pytest.approx(n2, abs=1e-12)
        np.testing.assert_allclose(v1, v2, atol=1e-12)
        # The result is orthogonal to every basis row.
        np.testing.assert_allclose(basis @ v1, 0.0, atol=1e-10)
        assert n1 == pytest.approx(float(np.linalg.norm(v1)), abs=1e-12)

    def test_orthogonalize_empty_basis(self):
        v0 = np.array([3.0, 4.0])
        basis = np.zeros((4, 2))

        def run():
            v = v0.copy()
            return kernels.orthogonalize(basis, 0, v), v

        (n1, v1), (n2, v2) = self.both(run)
        assert n1 == n2 == pytest.approx(5.0, abs=1e-12)
        np.testing.assert_allclose(v1, v0)

    def test_dense_matvec(self):
        rng = np.random.default_rng(2)
        mat = np.ascontiguousarray(rng.standard_normal((9, 7)))
        x = rng.standard_normal(7)
        got, exp = self.both(lambda: kernels.dense_matvec(mat, x))
        np.testing.assert_allclose(got, exp, atol=1e-12)
        np.testing.assert_allclose(got, mat @ x, atol=1e-12)

    def test_truncated_svd_matches_across_backends(self):
        from lsaqu.svd import truncated_svd

        from .conftest import weighted_tdm

        rng = np.random.default_rng(3)
        mat = random_sparse(rng, 30, 20, 0.2)

        def run():
            return truncated_svd(weighted_tdm(mat), 5, seed=9)

        (u1, s1, v1), (u2, s2, v2) = self.both(run)
        np.testing.assert_allclose(s1, s2, atol=1e-10)
        # Compare projections, not raw factors: within near-equal singular
        # values the basis may rotate between backends.
        np.testing.assert_allclose(u1 @ u1.T, u2 @ u2.T, atol=1e-8)
        np.testing.assert_allclose(v1 @ v1.T, v2 @ v2.T, atol=1e-8)

#!/usr/bin/env python3
"""Compare the compiled kernel backend against the pure-numpy fallback.

Times each low-level operation (CSR matvec / rmatvec, Gram-Schmidt
re-orthogonalization, dense matvec) and the end-to-end truncated SVD on
seeded random sparse matrices, then prints one table per matrix size.

Usage:
    python3 benchmarks/bench_kernels.py [--sizes 2000x1000,8000x4000]
                                        [--density 0.01] [--k 50]
                                        [--repeats 5] [--seed 0]
"""

from __future__ import annotations

import argparse
import time

import numpy as np
import scipy.sparse as sp

from lsaqu import kernels
from lsaqu.svd import truncated_svd
from lsaqu.weighting import WEIGHTED, TermDocMatrix


def best_of(repeats: int, fn) -> float:
    best = float("inf")
    for _ in range(repeats):
        started = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - started)
    return best


def random_sparse(rng: np.random.Generator, m: int, n: int, density: float):
    nnz = max(1, int(round(m * n * density)))
    flat = rng.choice(m * n, size=min(nnz, m * n), replace=False)
    rows, cols = np.divmod(flat, n)
    return sp.csr_matrix((rng.standard_normal(len(flat)), (rows, cols)), shape=(m, n))


def bench_case(m: int, n: int, density: float, k: int, repeats: int, seed: int) -> list[tuple]:
    rng = np.random.default_rng(seed)
    mat = random_sparse(rng, m, n, density)
    x = rng.standard_normal(n)
    y = rng.standard_normal(m)
    q, _ = np.linalg.qr(rng.standard_normal((m, min(64, m))))
    basis = np.ascontiguousarray(q.T)
    dense = np.ascontiguousarray(rng.standard_normal((min(256, m), n)))
    k = min(k, min(m, n) - 1)

    def svd_run():
        truncated_svd(TermDocMatrix.from_scipy(mat, WEIGHTED), k, seed=seed)

    ops = [
        ("csr matvec", lambda: kernels.make_csr_op(mat).matvec(x)),
        ("csr rmatvec", lambda: kernels.make_csr_op(mat).rmatvec(y)),
        ("orthogonalize (64 rows)", lambda: kernels.orthogonalize(basis, basis.shape[0], y.copy())),
        ("dense matvec", lambda: kernels.dense_matvec(dense, x)),
        (f"truncated_svd k={k}", svd_run),
    ]

    rows = []
    for name, fn in ops:
        times = {}
        for backend in kernels.available_backends():
            kernels.select_backend(backend)
            fn()  # warm up (allocations, caches)
            times[backend] = best_of(repeats, fn)
        rows.append((name, times))
    return rows


def print_table(title: str, rows: list[tuple]) -> None:
    backends = sorted(rows[0][1])
    header = ["operation"] + [f"{b} (ms)" for b in backends]
    if len(backends) == 2:
        header.append("speedup")
    widths = [max(len(header[0]), max(len(r[0]) for r in rows))] + [12] * (len(header) - 1)

    def fmt(cells):
        return "  ".join(str(c).ljust(w) for c, w in zip(cells, widths))

    print(f"\n{title}")
    print(fmt(header))
    print(fmt(["-" * w for w in widths]))
    for name, times in rows:
        cells = [name] + [f"{times[b] * 1e3:.3f}" for b in backends]
        if len(backends) == 2:
            slow, fast = times["numpy"], times.get("cython", times["numpy"])
            cells.append(f"{slow / fast:.2f}x" if fast > 0 else "n/a")
        print(fmt(cells))


def parse_sizes(text: str) -> list[tuple[int, int]]:
    sizes = []
    for part in text.split(","):
        m, _, n = part.strip().partition("x")
        sizes.append((int(m), int(n)))
    return sizes


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="2000x1000,8000x4000", type=parse_sizes)
    parser.add_argument("--density", default=0.01, type=float)
    parser.add_argument("--k", default=50, type=int)
    parser.add_argument("--repeats", default=5, type=int)
    parser.add_argument("--seed", default=0, type=int)
    args = parser.parse_args()

    print(f"available backends: {', '.join(kernels.available_backends())}")
    default = kernels.active_backend()
    try:
        for m, n in args.sizes:
            rows = bench_case(m, n, args.density, args.k, args.repeats, args.seed)
            print_table(
                f"{m}x{n} sparse, density {args.density:g} "
                f"(best of {args.repeats})",
                rows,
            )
    finally:
        kernels.select_backend(default)


if __name__ == "__main__":
    main()

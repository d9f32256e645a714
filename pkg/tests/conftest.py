"""Shared helpers for the test suite."""

from __future__ import annotations

from importlib.resources import files
from pathlib import Path

import numpy as np
import pytest
import scipy.sparse as sp

from lsaqu.corpus import Document, DocSource
from lsaqu.weighting import WEIGHTED, TermDocMatrix

FIXTURES = Path(str(files("lsaqu").joinpath("fixtures")))


@pytest.fixture(scope="session")
def fixture_paths() -> dict[str, Path]:
    return {
        "corpus": FIXTURES / "corpus.jsonl",
        "scales": FIXTURES / "scales.jsonl",
        "reviews": FIXTURES / "reviews.jsonl",
        "gold": FIXTURES / "gold.jsonl",
    }


def corpus_docs(texts: list[str]) -> list[Document]:
    return [
        Document(id=f"d{i:03d}", text=text, source=DocSource.CORPUS)
        for i, text in enumerate(texts)
    ]


def weighted_tdm(a) -> TermDocMatrix:
    """Wrap a dense array or sparse matrix as an already-weighted matrix."""
    return TermDocMatrix.from_scipy(sp.csr_matrix(a), WEIGHTED)


def random_sparse(rng: np.random.Generator, m: int, n: int, density: float):
    """Seeded random sparse matrix with gaussian values."""
    nnz = max(1, int(round(m * n * density)))
    flat = rng.choice(m * n, size=min(nnz, m * n), replace=False)
    rows, cols = np.divmod(flat, n)
    vals = rng.standard_normal(flat.shape[0])
    return sp.csr_matrix((vals, (rows, cols)), shape=(m, n))


#: A small pool of alphabetic tokens for synthetic text corpora.
WORDS = [
    "alpha", "bravo", "charlie", "delta", "echo", "foxtrot", "golf",
    "hotel", "india", "juliet", "kilo", "lima", "mike", "november",
    "oscar", "papa", "quebec", "romeo", "sierra", "tango",
]


def random_corpus(rng: np.random.Generator, n_docs: int, max_len: int = 12) -> list[Document]:
    """Random synthetic documents drawn from the shared word pool."""
    docs = []
    for i in range(n_docs):
        length = int(rng.integers(3, max_len + 1))
        words = rng.choice(WORDS, size=length, replace=True)
        docs.append(
            Document(id=f"d{i:03d}", text=" ".join(words), source=DocSource.CORPUS)
        )
    return docs


# ---------------------------------------------------------------------------
# Independent reference classifier: plain-Python loops, no shared code with
# lsaqu.subspace beyond the data types. Used to cross-check classify_all.


def brute_force_classify(sub, n: int, threshold: float):
    """(review_id, predicted_label_or_None) pairs, straight from the rules."""
    from collections import Counter

    by_id = {vec.origin_id: vec for vec in sub.reviews}
    results = []
    for review_id in sub.review_order:
        vec = by_id.get(review_id)
        if vec is None:
            results.append((review_id, None))
            continue
        scored = []
        for s in sub.scales:
            num = float(np.dot(s.coords, vec.coords))
            den = float(np.linalg.norm(s.coords)) * float(np.linalg.norm(vec.coords))
            scored.append((max(-1.0, min(1.0, num / den)), s.origin_id, s.label))
        scored.sort(key=lambda t: (-t[0], t[1]))
        top = scored[:n]
        if len(top) == 1 or top[0][0] - top[1][0] > threshold:
            results.append((review_id, top[0][2]))
            continue
        freq = Counter(label for _, _, label in top)
        best = max(freq.values())
        tied = {label for label, count in freq.items() if count == best}
        if len(tied) == 1:
            results.append((review_id, next(iter(tied))))
        else:
            winner = next(label for _, _, label in top if label in tied)
            results.append((review_id, winner))
    return results


def random_projected_subspace(rng: np.random.Generator, n_scales: int, n_reviews: int, k: int):
    """Synthetic Subspace of gaussian vectors with random labels.

    A few scale vectors are duplicated (same coordinates under a new id) so
    exact score ties genuinely occur.
    """
    from lsaqu.corpus import INDICATORS
    from lsaqu.space import OriginKind, ProjectedVector
    from lsaqu.subspace import Subspace

    fp = f"synthetic-{rng.integers(2**32)}"
    scales = []
    for i in range(n_scales):
        if i > 1 and rng.random() < 0.2:
            coords = scales[int(rng.integers(0, i))].coords.copy()
        else:
            coords = rng.standard_normal(k)
        scales.append(
            ProjectedVector(
                coords=coords,
                origin_id=f"s{i:03d}",
                origin_kind=OriginKind.SCALE,
                label=INDICATORS[int(rng.integers(0, 3))],
                space_fingerprint=fp,
            )
        )
    reviews = [
        ProjectedVector(
            coords=rng.standard_normal(k),
            origin_id=f"r{i:03d}",
            origin_kind=OriginKind.REVIEW,
            label=None,
            space_fingerprint=fp,
        )
        for i in range(n_reviews)
    ]
    return Subspace.from_vectors(scales, reviews)

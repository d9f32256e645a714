"""Term weighting: raw count matrices, log-entropy and TFIDF schemes.

The global weights fitted at space-build time are frozen into the scheme
so queries folded in later are weighted exactly like the training
columns were.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping

import numpy as np
import scipy.sparse as sp

from .corpus import Document, Vocabulary, tokenize
from .errors import DimensionError, SemanticsError

logger = logging.getLogger(__name__)

RAW_COUNTS = "raw_counts"
WEIGHTED = "weighted"

# Global weights closer to zero than this are snapped to exact zero so the
# "zero weight drops the row" rule is stable under float rounding.
_WEIGHT_SNAP = 1e-12


class WeightingKind(str, Enum):
    LOG_ENTROPY = "log_entropy"
    TFIDF = "tfidf"


@dataclass(frozen=True)
class TermDocMatrix:
    """A terms x documents sparse matrix with a semantics flag.

    ``matrix`` stores no explicit zeros; ``raw_counts`` entries are
    positive integers (held as float64), ``weighted`` entries are finite
    reals. ``oov_skipped`` counts tokens dropped for being outside the
    vocabulary.
    """

    matrix: sp.csr_matrix
    semantics: str
    oov_skipped: int = 0

    @property
    def n_terms(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_docs(self) -> int:
        return self.matrix.shape[1]

    @classmethod
    def from_scipy(cls, matrix, semantics: str, oov_skipped: int = 0) -> "TermDocMatrix":
        csr = sp.csr_matrix(matrix, dtype=np.float64)
        csr.sum_duplicates()
        csr.eliminate_zeros()
        return cls(matrix=csr, semantics=semantics, oov_skipped=oov_skipped)


@dataclass(frozen=True)
class WeightingScheme:
    """A fitted weighting: the kind plus one frozen global weight per term."""

    kind: WeightingKind
    global_weights: np.ndarray

    @property
    def n_terms(self) -> int:
        return self.global_weights.shape[0]


def build_raw_matrix(docs: Iterable[Document], vocab: Vocabulary) -> TermDocMatrix:
    """Count matrix with entry (i, j) = occurrences of term i in document j.

    Column order follows ``docs`` order. Tokens missing from ``vocab``
    are skipped and tallied in ``oov_skipped``.
    """
    if len(vocab) == 0:
        raise DimensionError("vocabulary is empty")

    rows: list[int] = []
    cols: list[int] = []
    vals: list[int] = []
    oov = 0
    n_docs = 0
    for j, doc in enumerate(docs):
        n_docs += 1
        counts: dict[int, int] = {}
        for tok in tokenize(doc.text):
            i = vocab.index.get(tok)
            if i is None:
                oov += 1
            else:
                counts[i] = counts.get(i, 0) + 1
        for i, c in counts.items():
            rows.append(i)
            cols.append(j)
            vals.append(c)

    matrix = sp.coo_matrix(
        (np.asarray(vals, dtype=np.float64), (rows, cols)),
        shape=(len(vocab), n_docs),
    ).tocsr()
    if oov:
        logger.info("skipped %d out-of-vocabulary tokens", oov)
    return TermDocMatrix(matrix=matrix, semantics=RAW_COUNTS, oov_skipped=oov)


def _require_raw(raw: TermDocMatrix) -> None:
    if raw.semantics != RAW_COUNTS:
        raise SemanticsError(f"expected a {RAW_COUNTS} matrix, got {raw.semantics}")


def fit_log_entropy(raw: TermDocMatrix) -> WeightingScheme:
    """Entropy-based global weight per term, in [0, 1].

    For term i with row sum gf_i and p_ij = tf_ij / gf_i over the nonzero
    entries: g_i = 1 + sum_j p_ij * ln(p_ij) / ln(n_docs). A term in a
    single document gets 1, a term spread uniformly over all documents
    gets 0. With n_docs == 1 (or a term absent from every column) the
    entropy is undefined and g_i falls back to 1 resp. 0.
    """
    _require_raw(raw)
    m = raw.matrix
    n_docs = raw.n_docs
    gf = np.asarray(m.sum(axis=1)).ravel()

    if n_docs <= 1:
        g = np.ones(raw.n_terms)
        g[gf == 0.0] = 0.0
        return WeightingScheme(kind=WeightingKind.LOG_ENTROPY, global_weights=g)

    row_of = np.repeat(np.arange(raw.n_terms), np.diff(m.indptr))
    p = m.data / gf[row_of]
    contrib = p * np.log(p)
    ent = np.zeros(raw.n_terms)
    np.add.at(ent, row_of, contrib)

    g = 1.0 + ent / np.log(n_docs)
    g[gf == 0.0] = 0.0
    g[np.abs(g) < _WEIGHT_SNAP] = 0.0
    return WeightingScheme(kind=WeightingKind.LOG_ENTROPY, global_weights=g)


def fit_tfidf(raw: TermDocMatrix) -> WeightingScheme:
    """Inverse document frequency per term: idf_i = ln(n_docs / df_i).

    Ubiquitous terms get exactly 0; terms absent from every column get 0
    as well (they carry no information about this corpus).
    """
    _require_raw(raw)
    df = np.diff(raw.matrix.indptr).astype(np.float64)
    idf = np.zeros(raw.n_terms)
    present = df > 0
    idf[present] = np.log(raw.n_docs / df[present])
    idf[np.abs(idf) < _WEIGHT_SNAP] = 0.0
    return WeightingScheme(kind=WeightingKind.TFIDF, global_weights=idf)


def fit_scheme(raw: TermDocMatrix, kind: WeightingKind) -> WeightingScheme:
    if kind is WeightingKind.LOG_ENTROPY:
        return fit_log_entropy(raw)
    return fit_tfidf(raw)


def _weight_entries(tf: np.ndarray, gw: np.ndarray, kind: WeightingKind) -> np.ndarray:
    if kind is WeightingKind.LOG_ENTROPY:
        return gw * np.log1p(tf)
    return tf * gw


def apply_weights(raw: TermDocMatrix, scheme: WeightingScheme) -> TermDocMatrix:
    """Weight every stored count; rows with a zero global weight vanish."""
    _require_raw(raw)
    if scheme.n_terms != raw.n_terms:
        raise DimensionError(
            f"scheme fitted on {scheme.n_terms} terms, matrix has {raw.n_terms}"
        )
    m = raw.matrix.copy()
    row_of = np.repeat(np.arange(raw.n_terms), np.diff(m.indptr))
    m.data = _weight_entries(m.data, scheme.global_weights[row_of], scheme.kind)
    m.eliminate_zeros()
    return TermDocMatrix(matrix=m, semantics=WEIGHTED, oov_skipped=raw.oov_skipped)


@dataclass(frozen=True)
class SparseVector:
    """A sparse real vector: sorted indices, matching values, full size."""

    indices: np.ndarray
    values: np.ndarray
    size: int


def weight_query_vector(
    token_counts: Mapping[int, int], scheme: WeightingScheme
) -> SparseVector:
    """Weight a query's term counts exactly like a training column.

    ``token_counts`` maps term indices (within the vocabulary) to raw
    counts; entries whose global weight is zero are dropped.
    """
    if token_counts:
        idx = np.fromiter(token_counts.keys(), dtype=np.int64, count=len(token_counts))
        if idx.min() < 0 or idx.max() >= scheme.n_terms:
            raise DimensionError("token index outside the vocabulary range")
        tf = np.fromiter(
            token_counts.values(), dtype=np.float64, count=len(token_counts)
        )
        order = np.argsort(idx)
        idx = idx[order]
        tf = tf[order]
        vals = _weight_entries(tf, scheme.global_weights[idx], scheme.kind)
        keep = vals != 0.0
        idx, vals = idx[keep], vals[keep]
    else:
        idx = np.empty(0, dtype=np.int64)
        vals = np.empty(0)
    return SparseVector(indices=idx, values=vals, size=scheme.n_terms)


def count_query_tokens(text: str, vocab: Vocabulary) -> dict[int, int]:
    """Tokenize ``text`` and count in-vocabulary tokens by term index."""
    counts: dict[int, int] = {}
    for tok in tokenize(text):
        i = vocab.index.get(tok)
        if i is not None:
            counts[i] = counts.get(i, 0) + 1
    return counts

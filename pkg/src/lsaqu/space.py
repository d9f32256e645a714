"""The universal semantic space: truncated factors, fold-in, persistence.

A SemanticSpace bundles the rank-k factors (U_k, sigma_k, optionally V_k)
with the vocabulary and the frozen weighting scheme, so unseen text can be
projected into the same coordinates the space was built in. Spaces persist
to a single versioned, checksummed binary file.
"""

from __future__ import annotations

import hashlib
import json
import logging
import struct
import zlib
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .corpus import Document, DocSource, QuIndicator, Vocabulary, build_vocabulary
from .errors import (
    ChecksumError,
    DimensionError,
    EmptyProjectionError,
    VersionError,
)
from .svd import truncated_svd
from .weighting import (
    WeightingKind,
    WeightingScheme,
    apply_weights,
    build_raw_matrix,
    count_query_tokens,
    fit_scheme,
    weight_query_vector,
)

logger = logging.getLogger(__name__)

MAGIC = b"LSAQU1"
FORMAT_VERSION = 1

DEFAULT_K = 300
# V_k is kept by default only below this corpus size; it is needed for
# validation, not classification, and dominates file size on big corpora.
KEEP_V_LIMIT = 100_000

ORTHONORMALITY_TOL = 1e-8


class OriginKind(str, Enum):
    """What a projected vector was folded from."""

    SCALE = "scale"
    REVIEW = "review"
    QUERY = "query"


_ORIGIN_BY_SOURCE = {
    DocSource.CORPUS: OriginKind.QUERY,
    DocSource.SCALE: OriginKind.SCALE,
    DocSource.REVIEW: OriginKind.REVIEW,
}


@dataclass(frozen=True)
class ProjectedVector:
    """A pseudo-document's k-dimensional coordinates in a space."""

    coords: np.ndarray
    origin_id: str
    origin_kind: OriginKind
    label: QuIndicator | None
    space_fingerprint: str

    def __post_init__(self) -> None:
        if not np.all(np.isfinite(self.coords)):
            raise DimensionError(f"non-finite coordinates for {self.origin_id!r}")
        self.coords.setflags(write=False)


@dataclass(frozen=True)
class SemanticSpace:
    """Truncated factors plus everything needed to fold new text in.

    ``u`` is n_terms x k with orthonormal columns, ``sigma`` holds the k
    strictly positive singular values in non-increasing order, and ``v``
    (n_docs x k, optional) is retained for validation only. ``meta`` is a
    JSON-serializable build record (config echo, corpus fingerprint).
    """

    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray | None
    vocab: Vocabulary
    scheme: WeightingScheme
    meta: dict = field(default_factory=dict)

    @property
    def k(self) -> int:
        return int(self.sigma.shape[0])

    @property
    def n_terms(self) -> int:
        return int(self.u.shape[0])

    @cached_property
    def fingerprint(self) -> str:
        """Content hash identifying the space; folded vectors carry it so a
        subspace can refuse to mix vectors from different spaces."""
        h = hashlib.sha256()
        h.update("\x00".join(self.vocab.terms).encode("utf-8"))
        h.update(struct.pack("<q", self.vocab.n_docs))
        h.update(self.scheme.kind.value.encode("ascii"))
        h.update(np.ascontiguousarray(self.scheme.global_weights, dtype="<f8").tobytes())
        h.update(np.ascontiguousarray(self.sigma, dtype="<f8").tobytes())
        h.update(np.ascontiguousarray(self.u, dtype="<f8").tobytes())
        return h.hexdigest()

    def validate(self) -> None:
        """Re-check the structural invariants; raises DimensionError."""
        if self.u.ndim != 2 or self.u.shape[1] != self.k:
            raise DimensionError("U and sigma dimensions disagree")
        if self.u.shape[0] != len(self.vocab) or self.scheme.n_terms != len(self.vocab):
            raise DimensionError("factor rows do not match the vocabulary")
        if self.v is not None and self.v.shape[1] != self.k:
            raise DimensionError("V and sigma dimensions disagree")
        if self.k == 0 or np.any(self.sigma <= 0.0):
            raise DimensionError("singular values must be strictly positive")
        if np.any(np.diff(self.sigma) > 0.0):
            raise DimensionError("singular values must be non-increasing")
        gram = self.u.T @ self.u
        if np.max(np.abs(gram - np.eye(self.k))) > ORTHONORMALITY_TOL:
            raise DimensionError("U columns are not orthonormal")
        if self.v is not None:
            gram = self.v.T @ self.v
            if np.max(np.abs(gram - np.eye(self.k))) > ORTHONORMALITY_TOL:
                raise DimensionError("V columns are not orthonormal")


def _corpus_fingerprint(docs: Sequence[Document]) -> str:
    h = hashlib.sha256()
    for doc in docs:
        h.update(doc.id.encode("utf-8"))
        h.update(b"\x00")
        h.update(doc.text.encode("utf-8"))
        h.update(b"\x01")
    return h.hexdigest()


def build_space(
    docs: Iterable[Document],
    k: int = DEFAULT_K,
    scheme_kind: WeightingKind = WeightingKind.LOG_ENTROPY,
    *,
    seed: int = 42,
    keep_v: bool | None = None,
    method: str = "lanczos",
) -> SemanticSpace:
    """Vocabulary -> raw counts -> weighting -> truncated SVD, bundled up.

    ``k`` is clamped to min(n_terms, n_docs) with a warning, and further
    reduced if the matrix rank falls short. ``keep_v`` defaults to True
    for corpora under ``KEEP_V_LIMIT`` documents.
    """
    docs = list(docs)
    vocab = build_vocabulary(docs)
    raw = build_raw_matrix(docs, vocab)
    scheme = fit_scheme(raw, scheme_kind)
    weighted = apply_weights(raw, scheme)

    limit = min(weighted.n_terms, weighted.n_docs)
    k_requested = k
    if k > limit:
        logger.warning(
            "k=%d exceeds min(n_terms=%d, n_docs=%d); clamping to %d",
            k, weighted.n_terms, weighted.n_docs, limit,
        )
        k = limit
    if k < 1:
        raise DimensionError(f"k={k_requested} must be at least 1")

    u, sigma, v = truncated_svd(weighted, k, seed=seed, method=method)

    if keep_v is None:
        keep_v = weighted.n_docs < KEEP_V_LIMIT

    meta = {
        "k_requested": int(k_requested),
        "k": int(sigma.shape[0]),
        "weighting": scheme_kind.value,
        "seed": int(seed),
        "method": method,
        "n_docs": int(weighted.n_docs),
        "n_terms": int(weighted.n_terms),
        "corpus_fingerprint": _corpus_fingerprint(docs),
        "timestamp": None,
    }
    return SemanticSpace(
        u=u,
        sigma=sigma,
        v=v if keep_v else None,
        vocab=vocab,
        scheme=scheme,
        meta=meta,
    )


def fold_in(doc: Document, space: SemanticSpace) -> ProjectedVector:
    """Project ``doc`` into the space: coords = q^T U_k diag(sigma)^-1.

    ``q`` is the document's term-count vector weighted with the space's
    frozen scheme. Raises EmptyProjectionError when no token of the
    document carries weight in the space (the coordinates would be the
    zero vector, which no cosine can be taken against).
    """
    counts = count_query_tokens(doc.text, space.vocab)
    q = weight_query_vector(counts, space.scheme)
    if q.indices.size == 0:
        raise EmptyProjectionError(
            f"document {doc.id!r} shares no weighted term with the space"
        )
    coords = (q.values @ space.u[q.indices, :]) / space.sigma
    if not np.any(coords):
        raise EmptyProjectionError(
            f"document {doc.id!r} projects to the zero vector"
        )
    return ProjectedVector(
        coords=coords,
        origin_id=doc.id,
        origin_kind=_ORIGIN_BY_SOURCE[doc.source],
        label=doc.label,
        space_fingerprint=space.fingerprint,
    )


# ---------------------------------------------------------------------------
# Persistence. Single little-endian binary file:
#   magic "LSAQU1" | version u16 | crc32 u32 | sections...
# where the crc covers every byte after itself and each section is a u64
# byte length followed by the payload. Section order is fixed: vocabulary
# JSON, scheme, sigma, U, V (zero-shape when absent), metadata JSON.


def _pack_section(payload: bytes) -> bytes:
    return struct.pack("<Q", len(payload)) + payload


def _pack_matrix(mat: np.ndarray | None) -> bytes:
    if mat is None:
        return struct.pack("<QQ", 0, 0)
    rows, cols = mat.shape
    body = np.ascontiguousarray(mat, dtype="<f8").tobytes()
    return struct.pack("<QQ", rows, cols) + body


def save_space(space: SemanticSpace, path: str | Path) -> None:
    """Write the space to ``path``; load_space restores it losslessly."""
    vocab_json = json.dumps(
        {
            "terms": list(space.vocab.terms),
            "doc_frequency": [space.vocab.doc_frequency[t] for t in space.vocab.terms],
            "n_docs": space.vocab.n_docs,
        },
        ensure_ascii=False,
    ).encode("utf-8")

    scheme_bytes = (
        struct.pack("<B", _SCHEME_CODES[space.scheme.kind])
        + struct.pack("<Q", space.scheme.n_terms)
        + np.ascontiguousarray(space.scheme.global_weights, dtype="<f8").tobytes()
    )
    sigma_bytes = (
        struct.pack("<Q", space.sigma.shape[0])
        + np.ascontiguousarray(space.sigma, dtype="<f8").tobytes()
    )
    meta_json = json.dumps(space.meta, ensure_ascii=False, sort_keys=True).encode("utf-8")

    payload = b"".join(
        _pack_section(part)
        for part in (
            vocab_json,
            scheme_bytes,
            sigma_bytes,
            _pack_matrix(space.u),
            _pack_matrix(space.v),
            meta_json,
        )
    )
    blob = (
        MAGIC
        + struct.pack("<H", FORMAT_VERSION)
        + struct.pack("<I", zlib.crc32(payload))
        + payload
    )
    Path(path).write_bytes(blob)


_SCHEME_CODES = {WeightingKind.LOG_ENTROPY: 0, WeightingKind.TFIDF: 1}
_SCHEME_KINDS = {code: kind for kind, code in _SCHEME_CODES.items()}


class _Reader:
    """Sequential reader that treats any under-read as file corruption."""

    def __init__(self, buf: bytes) -> None:
        self.buf = buf
        self.pos = 0

    def take(self, n: int) -> bytes:
        end = self.pos + n
        if end > len(self.buf):
            raise ChecksumError("file truncated")
        chunk = self.buf[self.pos : end]
        self.pos = end
        return chunk

    def u64(self) -> int:
        return struct.unpack("<Q", self.take(8))[0]

    def section(self) -> bytes:
        return self.take(self.u64())


def _unpack_matrix(payload: bytes) -> np.ndarray | None:
    r = _Reader(payload)
    rows, cols = struct.unpack("<QQ", r.take(16))
    if rows == 0 and cols == 0:
        return None
    body = r.take(rows * cols * 8)
    return np.frombuffer(body, dtype="<f8").reshape(rows, cols).astype(np.float64)


def load_space(path: str | Path) -> SemanticSpace:
    """Read a space written by save_space and re-verify its invariants.

    Raises VersionError for a foreign or newer file format and
    ChecksumError for truncation or corruption.
    """
    blob = Path(path).read_bytes()
    if len(blob) < len(MAGIC) + 6:
        raise ChecksumError("file truncated")
    if blob[: len(MAGIC)] != MAGIC:
        raise VersionError("not a semantic space file (bad magic)")
    offset = len(MAGIC)
    (version,) = struct.unpack_from("<H", blob, offset)
    if version != FORMAT_VERSION:
        raise VersionError(
            f"unsupported space file version {version} (supported: {FORMAT_VERSION})"
        )
    (stored_crc,) = struct.unpack_from("<I", blob, offset + 2)
    payload = blob[offset + 6 :]
    if zlib.crc32(payload) != stored_crc:
        raise ChecksumError("checksum mismatch (corrupt space file)")

    r = _Reader(payload)
    try:
        vocab_raw = json.loads(r.section().decode("utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ChecksumError(f"corrupt vocabulary section: {exc}") from None
    terms = tuple(vocab_raw["terms"])
    vocab = Vocabulary(
        terms=terms,
        index={t: i for i, t in enumerate(terms)},
        doc_frequency=dict(zip(terms, vocab_raw["doc_frequency"])),
        n_docs=int(vocab_raw["n_docs"]),
    )

    scheme_raw = _Reader(r.section())
    (code,) = struct.unpack("<B", scheme_raw.take(1))
    if code not in _SCHEME_KINDS:
        raise ChecksumError(f"unknown weighting code {code}")
    n_weights = scheme_raw.u64()
    weights = np.frombuffer(scheme_raw.take(n_weights * 8), dtype="<f8").astype(np.float64)
    scheme = WeightingScheme(kind=_SCHEME_KINDS[code], global_weights=weights)

    sigma_raw = _Reader(r.section())
    n_sigma = sigma_raw.u64()
    sigma = np.frombuffer(sigma_raw.take(n_sigma * 8), dtype="<f8").astype(np.float64)

    u = _unpack_matrix(r.section())
    if u is None:
        raise ChecksumError("missing U factor")
    v = _unpack_matrix(r.section())
    try:
        meta = json.loads(r.section().decode("utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ChecksumError(f"corrupt metadata section: {exc}") from None

    space = SemanticSpace(u=u, sigma=sigma, v=v, vocab=vocab, scheme=scheme, meta=meta)
    space.validate()
    return space

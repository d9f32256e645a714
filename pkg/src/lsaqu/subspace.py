"""The items subspace: folded scale and review vectors, retrieval, and the
label-filtering rule.

Scales act as labeled anchors; each review is scored against every scale
by cosine similarity and the top-n neighbors decide its label: a clear
winner (score gap above the threshold) is taken directly, otherwise the
neighbors vote by label frequency, with frequency ties broken by the
highest-scoring tied label.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .corpus import Document, QuIndicator
from .errors import (
    DimensionError,
    DuplicateIdError,
    EmptyNeighborListError,
    EmptyProjectionError,
    LabelError,
    NoScalesError,
    SpaceMismatchError,
    ZeroVectorError,
)
from .space import ProjectedVector, SemanticSpace, fold_in

logger = logging.getLogger(__name__)

DEFAULT_TOP_N = 6
DEFAULT_VARIANCE_THRESHOLD = 0.2


class RulePath(str, Enum):
    """Which branch of the filtering rule produced a prediction."""

    VARIANCE_GAP = "variance_gap"
    MAJORITY_VOTE = "majority_vote"
    TIE_BROKEN_BY_SCORE = "tie_broken_by_score"


@dataclass(frozen=True)
class Neighbor:
    """One retrieved scale: its id, label, and cosine score."""

    scale_id: str
    label: QuIndicator
    score: float


@dataclass(frozen=True)
class Prediction:
    """A review's inferred indicator with its ranked evidence.

    ``predicted`` is None when the review is unclassifiable (it never
    entered the subspace); ``neighbors`` is sorted by descending score.
    """

    review_id: str
    predicted: QuIndicator | None
    rule_path: RulePath | None
    neighbors: tuple[Neighbor, ...] = ()

    @property
    def unclassifiable(self) -> bool:
        return self.predicted is None


@dataclass(frozen=True)
class Subspace:
    """Labeled scale vectors plus review vectors sharing one space's basis.

    ``review_order`` preserves the input order of every review, including
    the ones excluded at fold-in, so downstream output order matches input
    order. All vectors must carry the same space fingerprint.
    """

    scales: tuple[ProjectedVector, ...]
    reviews: tuple[ProjectedVector, ...]
    review_order: tuple[str, ...]
    excluded_reviews: tuple[str, ...] = ()
    excluded_scales: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.scales:
            raise NoScalesError("subspace has no scale vectors")
        for vec in self.scales:
            if vec.label is None:
                raise LabelError(f"scale vector {vec.origin_id!r} has no label")
        fingerprint = self.scales[0].space_fingerprint
        k = self.scales[0].coords.shape[0]
        for vec in (*self.scales, *self.reviews):
            if vec.space_fingerprint != fingerprint:
                raise SpaceMismatchError(
                    f"vector {vec.origin_id!r} was folded into a different space"
                )
            if vec.coords.shape[0] != k:
                raise DimensionError(
                    f"vector {vec.origin_id!r} has dimension "
                    f"{vec.coords.shape[0]}, expected {k}"
                )
        for group, name in ((self.scales, "scale"), (self.reviews, "review")):
            ids = [vec.origin_id for vec in group]
            if len(set(ids)) != len(ids):
                dup = next(i for i in ids if ids.count(i) > 1)
                raise DuplicateIdError(f"duplicate {name} id {dup!r}")
        folded = {vec.origin_id for vec in self.reviews}
        ordered = set(self.review_order)
        if folded | set(self.excluded_reviews) != ordered or len(
            self.review_order
        ) != len(ordered):
            raise DimensionError("review_order does not match the review vectors")

    @classmethod
    def from_vectors(
        cls,
        scales: Sequence[ProjectedVector],
        reviews: Sequence[ProjectedVector],
    ) -> "Subspace":
        """Assemble a subspace from already-folded vectors."""
        return cls(
            scales=tuple(scales),
            reviews=tuple(reviews),
            review_order=tuple(vec.origin_id for vec in reviews),
        )

    @property
    def space_fingerprint(self) -> str:
        return self.scales[0].space_fingerprint

    @property
    def k(self) -> int:
        return int(self.scales[0].coords.shape[0])

    @cached_property
    def _scale_matrix(self) -> np.ndarray:
        return np.vstack([vec.coords for vec in self.scales])

    @cached_property
    def _scale_norms(self) -> np.ndarray:
        return np.linalg.norm(self._scale_matrix, axis=1)

    @cached_property
    def _review_by_id(self) -> dict[str, ProjectedVector]:
        return {vec.origin_id: vec for vec in self.reviews}


def build_subspace(
    scales: Iterable[Document],
    reviews: Iterable[Document],
    space: SemanticSpace,
) -> Subspace:
    """Fold every scale and review document into ``space``.

    Documents whose projection is empty are excluded and recorded:
    excluded scales are only warned about, excluded reviews surface later
    as unclassifiable predictions. Raises NoScalesError when no scale
    survives folding.
    """
    scale_vectors: list[ProjectedVector] = []
    excluded_scales: list[str] = []
    for doc in scales:
        if doc.label is None:
            raise LabelError(f"scale document {doc.id!r} has no label")
        try:
            scale_vectors.append(fold_in(doc, space))
        except EmptyProjectionError as exc:
            logger.warning("scale excluded: %s", exc)
            excluded_scales.append(doc.id)
    if not scale_vectors:
        raise NoScalesError("every scale document was excluded at fold-in")

    review_vectors: list[ProjectedVector] = []
    excluded_reviews: list[str] = []
    review_order: list[str] = []
    for doc in reviews:
        review_order.append(doc.id)
        try:
            review_vectors.append(fold_in(doc, space))
        except EmptyProjectionError as exc:
            logger.info("review excluded: %s", exc)
            excluded_reviews.append(doc.id)

    return Subspace(
        scales=tuple(scale_vectors),
        reviews=tuple(review_vectors),
        review_order=tuple(review_order),
        excluded_reviews=tuple(excluded_reviews),
        excluded_scales=tuple(excluded_scales),
    )


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity a.b / (|a||b|), clamped to [-1, 1]."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionError(f"vector shapes differ: {a.shape} vs {b.shape}")
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise ZeroVectorError("cosine of a zero vector is undefined")
    return float(np.clip(np.dot(a, b) / (na * nb), -1.0, 1.0))


def top_n_neighbors(
    review: ProjectedVector, sub: Subspace, n: int = DEFAULT_TOP_N
) -> list[Neighbor]:
    """The n scales most similar to ``review``, sorted by descending score.

    Equal scores are ordered by scale_id so results never depend on the
    scales' storage order. Fewer than n come back when the pool is small.
    """
    if n < 1:
        raise DimensionError(f"n={n} must be at least 1")
    if review.space_fingerprint != sub.space_fingerprint:
        raise SpaceMismatchError(
            f"review {review.origin_id!r} was folded into a different space"
        )
    if review.coords.shape[0] != sub.k:
        raise DimensionError(
            f"review {review.origin_id!r} has dimension "
            f"{review.coords.shape[0]}, expected {sub.k}"
        )
    rnorm = np.linalg.norm(review.coords)
    if rnorm == 0.0 or np.any(sub._scale_norms == 0.0):
        raise ZeroVectorError("cosine of a zero vector is undefined")
    scores = np.clip(
        (sub._scale_matrix @ review.coords) / (sub._scale_norms * rnorm), -1.0, 1.0
    )
    ranked = sorted(
        zip(scores.tolist(), sub.scales), key=lambda t: (-t[0], t[1].origin_id)
    )
    return [
        Neighbor(scale_id=vec.origin_id, label=vec.label, score=score)
        for score, vec in ranked[:n]
    ]


def predict(
    neighbors: Sequence[Neighbor],
    variance_threshold: float = DEFAULT_VARIANCE_THRESHOLD,
) -> tuple[QuIndicator, RulePath]:
    """Apply the filtering rule to a descending-sorted neighbor list.

    A single neighbor, or a top-two score gap above the threshold, decides
    directly (variance_gap). Otherwise the full list votes by label
    frequency (majority_vote); a frequency tie goes to the tied label with
    the highest-scoring neighbor (tie_broken_by_score).
    """
    if not neighbors:
        raise EmptyNeighborListError("cannot predict from an empty neighbor list")
    if len(neighbors) == 1:
        return neighbors[0].label, RulePath.VARIANCE_GAP
    if neighbors[0].score - neighbors[1].score > variance_threshold:
        return neighbors[0].label, RulePath.VARIANCE_GAP

    freq = Counter(nb.label for nb in neighbors)
    top_count = max(freq.values())
    tied = [label for label, count in freq.items() if count == top_count]
    if len(tied) == 1:
        return tied[0], RulePath.MAJORITY_VOTE
    tied_set = set(tied)
    for nb in neighbors:  # first hit is the highest-scoring tied label
        if nb.label in tied_set:
            return nb.label, RulePath.TIE_BROKEN_BY_SCORE
    raise AssertionError("unreachable: tied labels come from the neighbor list")


def classify_all(
    sub: Subspace,
    n: int = DEFAULT_TOP_N,
    threshold: float = DEFAULT_VARIANCE_THRESHOLD,
) -> list[Prediction]:
    """One Prediction per review, in input order.

    Reviews excluded at fold-in come back unclassifiable (predicted None,
    no neighbors) rather than silently dropped.
    """
    predictions: list[Prediction] = []
    for review_id in sub.review_order:
        vec = sub._review_by_id.get(review_id)
        if vec is None:
            predictions.append(
                Prediction(review_id=review_id, predicted=None, rule_path=None)
            )
            continue
        neighbors = top_n_neighbors(vec, sub, n)
        label, path = predict(neighbors, threshold)
        predictions.append(
            Prediction(
                review_id=review_id,
                predicted=label,
                rule_path=path,
                neighbors=tuple(neighbors),
            )
        )
    return predictions

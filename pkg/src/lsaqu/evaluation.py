"""Scoring predictions against gold labels.

Builds a 3x3 confusion grid (actual x predicted) with a separate
unclassifiable tally per actual class, then derives per-class precision,
recall, and F-measure plus their unweighted macro average. An
unclassifiable prediction counts as a false negative for its gold class
and never as a false positive, so it can only lower recall.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .corpus import INDICATORS, QuIndicator
from .errors import DuplicateIdError, EmptyMatrixError, MissingGoldError
from .subspace import Prediction

#: Row/column order of the confusion grid.
_CLASS_INDEX = {label: i for i, label in enumerate(INDICATORS)}


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts of (actual, predicted) pairs in INDICATORS order.

    ``grid[a][p]`` counts reviews with gold label INDICATORS[a] predicted
    as INDICATORS[p]; ``unclassifiable[a]`` counts reviews with gold label
    INDICATORS[a] that got no prediction at all.
    """

    grid: np.ndarray
    unclassifiable: np.ndarray
    n_evaluated: int

    def __post_init__(self) -> None:
        if self.grid.shape != (3, 3) or self.unclassifiable.shape != (3,):
            raise EmptyMatrixError("confusion grid must be 3x3 plus a 3-tally")
        if int(self.grid.sum() + self.unclassifiable.sum()) != self.n_evaluated:
            raise EmptyMatrixError("confusion counts do not sum to n_evaluated")
        self.grid.setflags(write=False)
        self.unclassifiable.setflags(write=False)


@dataclass(frozen=True)
class ClassScores:
    """Precision, recall, and F-measure for one class."""

    precision: float
    recall: float
    f_measure: float


@dataclass(frozen=True)
class ClassMetrics:
    """Per-class scores plus their unweighted mean F-measure."""

    per_class: Mapping[QuIndicator, ClassScores]
    macro_f: float


def confusion(
    preds: Sequence[Prediction], gold: Mapping[str, QuIndicator]
) -> ConfusionMatrix:
    """Tally predictions against ``gold`` (review id -> actual label).

    Raises MissingGoldError when a prediction has no gold label and
    DuplicateIdError when a review id is predicted twice.
    """
    grid = np.zeros((3, 3), dtype=np.int64)
    unclassifiable = np.zeros(3, dtype=np.int64)
    seen: set[str] = set()
    for pred in preds:
        if pred.review_id in seen:
            raise DuplicateIdError(f"review {pred.review_id!r} predicted twice")
        seen.add(pred.review_id)
        actual = gold.get(pred.review_id)
        if actual is None:
            raise MissingGoldError(f"no gold label for review {pred.review_id!r}")
        a = _CLASS_INDEX[actual]
        if pred.predicted is None:
            unclassifiable[a] += 1
        else:
            grid[a, _CLASS_INDEX[pred.predicted]] += 1
    return ConfusionMatrix(
        grid=grid, unclassifiable=unclassifiable, n_evaluated=len(preds)
    )


def _f_measure(precision: float, recall: float) -> float:
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def metrics(cm: ConfusionMatrix) -> ClassMetrics:
    """Per-class P/R/F and macro F from a confusion matrix.

    For class c: TP = grid[c][c], FP = off-diagonal column c, FN =
    off-diagonal row c plus unclassifiable[c]; every 0/0 ratio is 0.
    """
    if cm.n_evaluated < 1:
        raise EmptyMatrixError("cannot score an empty evaluation")
    per_class: dict[QuIndicator, ClassScores] = {}
    f_values = []
    for label, c in _CLASS_INDEX.items():
        tp = int(cm.grid[c, c])
        fp = int(cm.grid[:, c].sum()) - tp
        fn = int(cm.grid[c, :].sum()) - tp + int(cm.unclassifiable[c])
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f = _f_measure(precision, recall)
        per_class[label] = ClassScores(precision=precision, recall=recall, f_measure=f)
        f_values.append(f)
    return ClassMetrics(per_class=per_class, macro_f=sum(f_values) / len(f_values))

"""Latent semantic classification of app reviews against quality-in-use scales.

The pipeline: build a truncated-SVD semantic space over a text corpus,
fold quality-scale items and review sentences into it as pseudo-documents,
label each review by its nearest scale items, and score the labels against
a gold standard.
"""

from .corpus import (
    INDICATORS,
    Document,
    DocSource,
    QuIndicator,
    Vocabulary,
    build_vocabulary,
    load_documents,
    tokenize,
)
from .errors import (
    ChecksumError,
    ConvergenceError,
    DimensionError,
    DuplicateIdError,
    EmptyCorpusError,
    EmptyMatrixError,
    EmptyNeighborListError,
    EmptyProjectionError,
    FormatError,
    LabelError,
    LsaquError,
    MissingGoldError,
    NoScalesError,
    SemanticsError,
    SpaceMismatchError,
    VersionError,
    ZeroVectorError,
)
from .evaluation import ClassMetrics, ClassScores, ConfusionMatrix, confusion, metrics
from .space import (
    OriginKind,
    ProjectedVector,
    SemanticSpace,
    build_space,
    fold_in,
    load_space,
    save_space,
)
from .subspace import (
    Neighbor,
    Prediction,
    RulePath,
    Subspace,
    build_subspace,
    classify_all,
    cosine,
    predict,
    top_n_neighbors,
)
from .svd import truncated_svd
from .weighting import (
    TermDocMatrix,
    WeightingKind,
    WeightingScheme,
    apply_weights,
    build_raw_matrix,
    fit_scheme,
    weight_query_vector,
)

__version__ = "0.1.0"

__all__ = [
    "ChecksumError",
    "ClassMetrics",
    "ClassScores",
    "ConfusionMatrix",
    "ConvergenceError",
    "DimensionError",
    "DocSource",
    "Document",
    "DuplicateIdError",
    "EmptyCorpusError",
    "EmptyMatrixError",
    "EmptyNeighborListError",
    "EmptyProjectionError",
    "FormatError",
    "INDICATORS",
    "LabelError",
    "LsaquError",
    "MissingGoldError",
    "Neighbor",
    "NoScalesError",
    "OriginKind",
    "Prediction",
    "ProjectedVector",
    "QuIndicator",
    "RulePath",
    "SemanticSpace",
    "SemanticsError",
    "SpaceMismatchError",
    "Subspace",
    "TermDocMatrix",
    "VersionError",
    "Vocabulary",
    "WeightingKind",
    "WeightingScheme",
    "ZeroVectorError",
    "apply_weights",
    "build_raw_matrix",
    "build_space",
    "build_subspace",
    "build_vocabulary",
    "classify_all",
    "confusion",
    "cosine",
    "fit_scheme",
    "fold_in",
    "load_documents",
    "load_space",
    "metrics",
    "predict",
    "save_space",
    "tokenize",
    "top_n_neighbors",
    "truncated_svd",
    "weight_query_vector",
]

"""Exception hierarchy shared by every stage of the pipeline.

Everything raised on purpose derives from :class:`LsaquError`, so callers
(and the CLI) can separate input/validation failures from genuine bugs.
"""


class LsaquError(Exception):
    """Base class for all errors raised by this package."""


class FormatError(LsaquError):
    """An input file or record is malformed."""


class LabelError(LsaquError):
    """A label is missing, unknown, or not allowed for the document source."""


class EmptyCorpusError(LsaquError):
    """No documents, or every document tokenized to nothing."""


class DimensionError(LsaquError):
    """Matrix or vector shapes do not line up."""


class SemanticsError(LsaquError):
    """A matrix with the wrong semantics flag was passed (raw vs weighted)."""


class EmptyMatrixError(LsaquError):
    """The matrix has no nonzero entry (or nothing was evaluated)."""


class ConvergenceError(LsaquError):
    """The iterative SVD failed to reach tolerance within the iteration cap."""


class VersionError(LsaquError):
    """A persisted file has the wrong magic or an unsupported format version."""


class ChecksumError(LsaquError):
    """A persisted file is truncated or corrupted."""


class EmptyProjectionError(LsaquError):
    """Folding a document produced the zero vector (e.g. all tokens OOV)."""


class NoScalesError(LsaquError):
    """No usable measurement scales remain after folding/exclusion."""


class SpaceMismatchError(LsaquError):
    """Vectors folded into different semantic spaces were combined."""


class ZeroVectorError(LsaquError):
    """Cosine similarity is undefined for a zero vector."""


class EmptyNeighborListError(LsaquError):
    """The filtering rule needs at least one retrieved neighbor."""


class MissingGoldError(LsaquError):
    """A prediction refers to a review id with no gold label."""


class DuplicateIdError(LsaquError):
    """The same review id appeared more than once."""

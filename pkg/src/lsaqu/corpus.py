"""Document ingestion, tokenization, and vocabulary construction.

Input files are JSON Lines (one object per line with a required ``text``
field, optional ``id`` and ``label``) or plain text (one document per
line). Everything built here is immutable and safe to share.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable

from .errors import EmptyCorpusError, FormatError, LabelError

_TOKEN_RE = re.compile(r"[^\W_]+")

AUTO_ID_FORMAT = "doc-{:06d}"


class QuIndicator(str, Enum):
    """The three quality-in-use indicators a review can be assigned to."""

    EFFECTIVENESS = "effectiveness"
    EFFICIENCY = "efficiency"
    FREEDOM_FROM_RISK = "freedom_from_risk"

    @classmethod
    def from_string(cls, value: str) -> "QuIndicator":
        try:
            return cls(value)
        except ValueError:
            known = ", ".join(m.value for m in cls)
            raise LabelError(f"unknown label {value!r} (expected one of: {known})") from None


#: Canonical indicator order used for confusion matrices and reports.
INDICATORS: tuple[QuIndicator, ...] = tuple(QuIndicator)


class DocSource(str, Enum):
    """Where a document comes from; decides label requirements."""

    CORPUS = "corpus"
    SCALE = "scale"
    REVIEW = "review"


@dataclass(frozen=True)
class Document:
    """One unit of text: a corpus paragraph, a scale item, or a review."""

    id: str
    text: str
    source: DocSource
    label: QuIndicator | None = None

    def __post_init__(self) -> None:
        if self.source is DocSource.SCALE and self.label is None:
            raise LabelError(f"scale document {self.id!r} has no label")
        if self.source is DocSource.CORPUS and self.label is not None:
            raise LabelError(f"corpus document {self.id!r} must not carry a label")


def tokenize(text: str) -> list[str]:
    """Deterministic tokenizer: lowercase, split on non-alphanumeric runs,
    keep tokens of length >= 2, drop pure-digit tokens.

    Total function: any string (including empty) is accepted.
    """
    return [
        tok
        for tok in _TOKEN_RE.findall(text.lower())
        if len(tok) >= 2 and not tok.isdigit()
    ]


def _parse_jsonl_record(raw: str, lineno: int) -> dict:
    try:
        record = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise FormatError(f"line {lineno}: invalid JSON ({exc.msg})") from None
    if not isinstance(record, dict):
        raise FormatError(f"line {lineno}: expected a JSON object, got {type(record).__name__}")
    return record


def load_documents(
    path: str | Path,
    source: DocSource,
    label_mode: str | None = None,
    fmt: str = "jsonl",
) -> list[Document]:
    """Read one Document per record from ``path``, preserving file order.

    ``label_mode`` is ``"per_line_field"`` (read the ``label`` field) or
    ``"none"`` (ignore labels entirely). It defaults to ``per_line_field``
    for scales and reviews and to ``none`` for corpus files, so a labeled
    reviews file can be reused as corpus input without editing.

    Records without an ``id`` get a sequential one (``doc-000001``, ...)
    based on their position in the file.

    Raises OSError for unreadable paths, FormatError for malformed records
    or duplicate ids, and LabelError for unknown labels or scale records
    without one (all with line numbers).
    """
    if fmt not in ("jsonl", "text"):
        raise FormatError(f"unknown format {fmt!r} (expected 'jsonl' or 'text')")
    if label_mode is None:
        label_mode = "none" if source is DocSource.CORPUS else "per_line_field"
    if label_mode not in ("none", "per_line_field"):
        raise FormatError(f"unknown label mode {label_mode!r}")

    path = Path(path)
    raw_lines = path.read_text(encoding="utf-8").splitlines()

    docs: list[Document] = []
    seen_ids: set[str] = set()
    ordinal = 0
    for lineno, line in enumerate(raw_lines, start=1):
        if fmt == "jsonl":
            if not line.strip():
                continue
            record = _parse_jsonl_record(line, lineno)
            text = record.get("text")
            if not isinstance(text, str):
                raise FormatError(f"line {lineno}: missing or non-string 'text' field")
            doc_id = record.get("id")
            if doc_id is not None and not isinstance(doc_id, str):
                raise FormatError(f"line {lineno}: 'id' must be a string")
            raw_label = record.get("label") if label_mode == "per_line_field" else None
        else:
            text = line
            doc_id = None
            raw_label = None

        ordinal += 1
        if doc_id is None:
            doc_id = AUTO_ID_FORMAT.format(ordinal)
        if doc_id in seen_ids:
            raise FormatError(f"line {lineno}: duplicate document id {doc_id!r}")
        seen_ids.add(doc_id)

        label: QuIndicator | None = None
        if raw_label is not None:
            if not isinstance(raw_label, str):
                raise FormatError(f"line {lineno}: 'label' must be a string")
            try:
                label = QuIndicator.from_string(raw_label)
            except LabelError as exc:
                raise LabelError(f"line {lineno}: {exc}") from None
        if source is DocSource.SCALE and label is None:
            raise LabelError(f"line {lineno}: scale record {doc_id!r} is missing a label")

        docs.append(Document(id=doc_id, text=text, source=source, label=label))

    return docs


@dataclass(frozen=True)
class Vocabulary:
    """Lexicographically ordered terms with document frequencies.

    ``index`` maps each term to its row in the term-document matrix;
    the sorted order makes matrices bit-identical across runs.
    """

    terms: tuple[str, ...]
    index: dict[str, int]
    doc_frequency: dict[str, int]
    n_docs: int

    def __len__(self) -> int:
        return len(self.terms)


def build_vocabulary(docs: Iterable[Document]) -> Vocabulary:
    """Union of all tokens over ``docs``, sorted, with document frequencies.

    Raises EmptyCorpusError when there are no documents or every document
    tokenizes to nothing.
    """
    docs = list(docs)
    if not docs:
        raise EmptyCorpusError("no documents")

    doc_frequency: dict[str, int] = {}
    for doc in docs:
        for tok in set(tokenize(doc.text)):
            doc_frequency[tok] = doc_frequency.get(tok, 0) + 1
    if not doc_frequency:
        raise EmptyCorpusError("every document tokenized to nothing")

    terms = tuple(sorted(doc_frequency))
    index = {term: i for i, term in enumerate(terms)}
    return Vocabulary(terms=terms, index=index, doc_frequency=doc_frequency, n_docs=len(docs))

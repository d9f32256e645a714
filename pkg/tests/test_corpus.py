"""Tokenizer, document loading, and vocabulary construction."""

from __future__ import annotations

import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from lsaqu.corpus import (
    Document,
    DocSource,
    QuIndicator,
    build_vocabulary,
    load_documents,
    tokenize,
)
from lsaqu.errors import EmptyCorpusError, FormatError, LabelError

from .conftest import corpus_docs


class TestTokenize:
    def test_empty_string(self):
        assert tokenize("") == []

    def test_basic_sentence(self):
        assert tokenize("Quick install and startup easy.") == [
            "quick", "install", "and", "startup", "easy",
        ]

    def test_single_char_and_digit_tokens_dropped(self):
        assert tokenize("Q^T Q = I") == []
        assert tokenize("a 1 22 333 b2b") == ["b2b"]

    def test_lowercase_and_punctuation_split(self):
        assert tokenize("Re-Install; NOW!") == ["re", "install", "now"]

    def test_underscore_splits(self):
        assert tokenize("snake_case_token") == ["snake", "case", "token"]

    @given(st.text(max_size=200))
    def test_idempotent_under_rejoin(self, text):
        tokens = tokenize(text)
        assert tokenize(" ".join(tokens)) == tokens

    @given(st.text(max_size=200))
    def test_all_tokens_valid(self, text):
        for tok in tokenize(text):
            assert len(tok) >= 2
            assert tok == tok.lower()
            assert not tok.isdigit()


class TestDocument:
    def test_scale_requires_label(self):
        with pytest.raises(LabelError):
            Document(id="s1", text="x", source=DocSource.SCALE)

    def test_corpus_forbids_label(self):
        with pytest.raises(LabelError):
            Document(
                id="c1", text="x", source=DocSource.CORPUS,
                label=QuIndicator.EFFICIENCY,
            )

    def test_review_label_optional(self):
        Document(id="r1", text="x", source=DocSource.REVIEW)
        Document(id="r2", text="x", source=DocSource.REVIEW, label=QuIndicator.EFFICIENCY)

    def test_unknown_label_string(self):
        with pytest.raises(LabelError):
            QuIndicator.from_string("speed")


class TestLoadDocuments:
    def _write(self, tmp_path, lines, name="docs.jsonl"):
        path = tmp_path / name
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return path

    def test_order_and_count_preserved(self, tmp_path):
        lines = [json.dumps({"text": f"doc number {i}"}) for i in range(3)]
        docs = load_documents(self._write(tmp_path, lines), DocSource.CORPUS)
        assert [d.text for d in docs] == ["doc number 0", "doc number 1", "doc number 2"]
        assert [d.id for d in docs] == ["doc-000001", "doc-000002", "doc-000003"]

    def test_labeled_scale_record(self, tmp_path):
        line = json.dumps({"text": "Buy at your own risk.", "label": "freedom_from_risk"})
        (doc,) = load_documents(self._write(tmp_path, [line]), DocSource.SCALE)
        assert doc.label is QuIndicator.FREEDOM_FROM_RISK

    def test_unknown_label_raises_with_line_number(self, tmp_path):
        line = json.dumps({"text": "x", "label": "speed"})
        with pytest.raises(LabelError, match="line 1"):
            load_documents(self._write(tmp_path, [line]), DocSource.SCALE)

    def test_scale_without_label(self, tmp_path):
        line = json.dumps({"text": "x"})
        with pytest.raises(LabelError, match="missing a label"):
            load_documents(self._write(tmp_path, [line]), DocSource.SCALE)

    def test_corpus_ignores_labels(self, tmp_path):
        line = json.dumps({"text": "x", "label": "efficiency"})
        (doc,) = load_documents(self._write(tmp_path, [line]), DocSource.CORPUS)
        assert doc.label is None

    def test_duplicate_id_rejected(self, tmp_path):
        lines = [json.dumps({"id": "a", "text": "x"})] * 2
        with pytest.raises(FormatError, match="duplicate"):
            load_documents(self._write(tmp_path, lines), DocSource.REVIEW)

    def test_malformed_json(self, tmp_path):
        with pytest.raises(FormatError, match="line 2"):
            load_documents(
                self._write(tmp_path, [json.dumps({"text": "x"}), "{oops"]),
                DocSource.CORPUS,
            )

    def test_missing_text_field(self, tmp_path):
        with pytest.raises(FormatError, match="text"):
            load_documents(self._write(tmp_path, [json.dumps({"id": "a"})]), DocSource.CORPUS)

    def test_blank_lines_skipped(self, tmp_path):
        lines = [json.dumps({"text": "x"}), "", json.dumps({"text": "y"})]
        docs = load_documents(self._write(tmp_path, lines), DocSource.CORPUS)
        assert [d.text for d in docs] == ["x", "y"]
        assert docs[1].id == "doc-000002"

    def test_text_format(self, tmp_path):
        path = tmp_path / "docs.txt"
        path.write_text("first line\nsecond line\n", encoding="utf-8")
        docs = load_documents(path, DocSource.CORPUS, fmt="text")
        assert [d.text for d in docs] == ["first line", "second line"]

    def test_unreadable_path(self, tmp_path):
        with pytest.raises(OSError):
            load_documents(tmp_path / "missing.jsonl", DocSource.CORPUS)


class TestBuildVocabulary:
    def test_sorted_terms_and_frequencies(self):
        vocab = build_vocabulary(corpus_docs(["aa bb", "bb cc"]))
        assert vocab.terms == ("aa", "bb", "cc")
        assert vocab.doc_frequency == {"aa": 1, "bb": 2, "cc": 1}
        assert vocab.n_docs == 2
        assert vocab.index == {"aa": 0, "bb": 1, "cc": 2}

    def test_single_term_corpus(self):
        vocab = build_vocabulary(corpus_docs(["xx xx xx"]))
        assert vocab.terms == ("xx",)
        assert vocab.doc_frequency == {"xx": 1}

    def test_empty_corpus(self):
        with pytest.raises(EmptyCorpusError):
            build_vocabulary([])

    def test_punctuation_only_docs(self):
        with pytest.raises(EmptyCorpusError):
            build_vocabulary(corpus_docs(["... !!!", "1 2 3"]))

    @given(st.lists(st.text(max_size=40), min_size=1, max_size=8))
    def test_permutation_invariance(self, texts):
        docs = corpus_docs(texts)
        try:
            vocab = build_vocabulary(docs)
        except EmptyCorpusError:
            return
        reversed_vocab = build_vocabulary(list(reversed(docs)))
        assert vocab.terms == reversed_vocab.terms
        assert vocab.doc_frequency == reversed_vocab.doc_frequency

    @given(st.lists(st.text(max_size=40), min_size=1, max_size=8))
    def test_frequency_bounds(self, texts):
        docs = corpus_docs(texts)
        try:
            vocab = build_vocabulary(docs)
        except EmptyCorpusError:
            return
        for term, df in vocab.doc_frequency.items():
            assert 1 <= df <= vocab.n_docs
            assert term in vocab.index
        assert list(vocab.terms) == sorted(vocab.terms)

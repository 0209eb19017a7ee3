"""Tests for corpus ingestion and tokenization"""

import pytest

from news_weak_supervision.config import FilterConfig
from news_weak_supervision.corpus import (
    Corpus,
    Document,
    ingest_corpus,
    read_corpus,
    tokenize,
    write_corpus,
)
from news_weak_supervision.exceptions import (
    CorpusFormatError,
    DuplicateDocumentError,
    UnknownDocumentError,
)
from tests.conftest import words


class TestTokenize:
    """Test suite for the shared tokenizer"""

    @pytest.mark.parametrize("text, expected", [
        ("When Bird Flies In", ("when", "bird", "flies", "in")),
        ("", ()),
        ("U.S.-China trade, 2024!", ("u", "s", "china", "trade", "2024")),
        ("snake_case  and\ttabs", ("snake", "case", "and", "tabs")),
        ("Café au lait", ("café", "au", "lait")),
        ("  ...  ", ()),
    ])
    def test_examples(self, text, expected):
        """Test lowercasing and splitting on non-alphanumeric runs"""
        assert tokenize(text).tokens == expected

    def test_tokens_are_normalized(self):
        """Test every token is lowercase, non-empty and whitespace free"""
        result = tokenize("Mixed CASE, punctuation; and\nnew-lines!  Done")

        assert all(t and t == t.lower() and not any(c.isspace() for c in t) for t in result)

    def test_source_field(self):
        """Test the source field is carried along"""
        assert tokenize("x", "headline").source_field == "headline"
        assert len(tokenize("a b c")) == 3


class TestIngestCorpus:
    """Test suite for corpus ingestion"""

    @pytest.mark.parametrize("length, admitted", [(5, False), (6, True), (16, True), (17, False)])
    def test_headline_bounds_inclusive(self, write_tsv, filter_config, length, admitted):
        """Test the 6 to 16 token admission boundary"""
        path = write_tsv([("d1", words("h", length), "some content here")])

        result = ingest_corpus(path, filter_config)

        assert (len(result.admitted) == 1) is admitted
        assert result.rejected_count == (0 if admitted else 1)

    def test_normalized_tokens_are_counted(self, write_tsv, filter_config):
        """Test punctuation does not count as tokens"""
        path = write_tsv([("d1", "U.S.-China trade, 2024!", "content")])

        # five normalized tokens: below the lower bound
        assert ingest_corpus(path, filter_config).rejected_count == 1

    def test_order_counts_and_stats(self, write_tsv, filter_config):
        """Test admitted order, the count identity and statistics over admitted documents"""
        path = write_tsv([
            ("b", words("x", 6), "one two three"),
            ("a", words("y", 3), "ignored because of the short headline"),
            ("c", words("z", 8), "four five six seven eight"),
        ])

        admitted, stats, rejected = ingest_corpus(path, filter_config)

        assert [d.doc_id for d in admitted] == ["b", "c"]
        assert len(admitted) + rejected == 3
        assert stats.doc_count == 2
        assert stats.total_content_tokens == 8
        assert stats.avg_content_length == 4.0
        assert stats.doc_lengths == {"b": 3, "c": 5}

    def test_custom_bounds(self, write_tsv):
        """Test bounds come from the configuration"""
        path = write_tsv([("d1", words("h", 2), "c"), ("d2", words("h", 4), "c")])
        cfg = FilterConfig(min_headline_tokens=1, max_headline_tokens=3)

        admitted, _, rejected = ingest_corpus(path, cfg)

        assert [d.doc_id for d in admitted] == ["d1"]
        assert rejected == 1

    def test_deterministic(self, write_tsv, filter_config):
        """Test re-ingesting yields identical results"""
        path = write_tsv([(f"d{i}", words("h", 6 + i % 12), f"content {i}") for i in range(20)])

        assert ingest_corpus(path, filter_config) == ingest_corpus(path, filter_config)

    def test_malformed_line_names_line_number(self, write_tsv, filter_config):
        """Test that a record without three fields is reported with its line"""
        path = write_tsv([("d1", words("h", 6), "c"), ("d2", "only two fields")])

        with pytest.raises(CorpusFormatError) as excinfo:
            ingest_corpus(path, filter_config)

        assert excinfo.value.line_number == 2
        assert ":2:" in str(excinfo.value)

    def test_empty_field_is_malformed(self, write_tsv):
        """Test whitespace-only fields are rejected"""
        path = write_tsv([("d1", "   ", "content")])

        with pytest.raises(CorpusFormatError, match="empty field"):
            read_corpus(path)

    def test_duplicate_doc_id(self, write_tsv, filter_config):
        """Test that a repeated doc_id is reported by id"""
        path = write_tsv([("d1", words("h", 6), "a"), ("d1", words("g", 6), "b")])

        with pytest.raises(DuplicateDocumentError, match="d1"):
            ingest_corpus(path, filter_config)

    def test_blank_lines_skipped(self, tmp_path, filter_config):
        """Test that blank lines are not records"""
        path = tmp_path / "corpus.tsv"
        path.write_text(f"\nd1\t{words('h', 6)}\tcontent\n\n", encoding="utf-8")

        admitted, _, rejected = ingest_corpus(path, filter_config)

        assert len(admitted) == 1
        assert rejected == 0

    def test_missing_file(self, tmp_path, filter_config):
        """Test that an unreadable corpus raises a format error"""
        with pytest.raises(CorpusFormatError, match="cannot open"):
            ingest_corpus(tmp_path / "nope.tsv", filter_config)

    def test_comma_in_doc_id(self, write_tsv):
        """Test ids that would split in the negatives column are rejected with their line"""
        path = write_tsv([("d1", words("h", 6), "a"), ("a,b", words("g", 6), "b")])

        with pytest.raises(CorpusFormatError, match="contains a comma") as excinfo:
            read_corpus(path)

        assert excinfo.value.line_number == 2

    def test_text_whitespace_is_canonical(self, write_tsv):
        """Test whitespace runs inside text fields read as single spaces"""
        path = write_tsv([("d1", "  A  big   headline ", "Body  text here")])

        assert read_corpus(path) == [Document("d1", "A big headline", "Body text here")]

    def test_written_corpus_reads_back_unchanged(self, write_tsv, tmp_path):
        """Test a corpus read from a file survives write and read byte for byte"""
        source = write_tsv([
            ("d1", "Two  spaced   headline", "Content with  runs"),
            ("d2", "plain headline", "plain content"),
        ])
        first = tmp_path / "first.tsv"
        second = tmp_path / "second.tsv"

        documents = read_corpus(source)
        write_corpus(first, documents)
        write_corpus(second, read_corpus(first))

        assert read_corpus(first) == documents
        assert first.read_bytes() == second.read_bytes()


class TestCorpus:
    """Test suite for the Corpus container"""

    def test_lookup_and_tokens(self):
        """Test id lookup and cached token streams"""
        corpus = Corpus([Document("d1", "Big News Today", "Body of the story")])

        assert "d1" in corpus
        assert len(corpus) == 1
        assert corpus.get("d1").headline == "Big News Today"
        assert corpus.headline_tokens("d1").tokens == ("big", "news", "today")
        assert corpus.content_tokens("d1").source_field == "content"
        assert corpus.stats().doc_lengths == {"d1": 4}

    def test_unknown_document(self):
        """Test unknown ids raise UnknownDocumentError"""
        corpus = Corpus([])

        with pytest.raises(UnknownDocumentError, match="missing"):
            corpus.get("missing")
        with pytest.raises(UnknownDocumentError):
            corpus.content_tokens("missing")

    def test_duplicate_rejected(self):
        """Test the container refuses duplicate ids"""
        with pytest.raises(DuplicateDocumentError):
            Corpus([Document("d1", "a", "b"), Document("d1", "c", "d")])

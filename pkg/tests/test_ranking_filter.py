"""Tests for the ranking filter and the pairs file"""

import pytest

from news_weak_supervision.bm25 import BM25Index
from news_weak_supervision.config import FilterConfig
from news_weak_supervision.corpus import Document, compute_stats, ingest_corpus, write_corpus
from news_weak_supervision.exceptions import PairFormatError
from news_weak_supervision.ranking_filter import (
    RankedPair,
    apply_ranking_filter,
    rank_pseudo_query,
    read_pairs,
    write_pairs,
)
from news_weak_supervision.synthetic import generate_corpus
from tests import oracles
from tests.conftest import words


def build(documents):
    return BM25Index.build(documents, compute_stats(documents))


def top_of_its_own_query():
    """One article matching all of its headline plus ten weaker single-term hits"""
    headline = "alpha beta gamma delta epsilon zeta"
    docs = [Document("q", headline, headline)]
    for i in range(10):
        docs.append(Document(f"o{i}", words(f"o{i}h", 6), f"alpha {words(f'pad{i}x', 5)}"))
    return docs


def buried_article():
    """An article ranked 31st for its own headline behind 30 complete matches"""
    headline = "h1 h2 h3 h4 h5 h6"
    docs = [Document("q", headline, "h1 " + words("qpad", 30))]
    for i in range(30):
        docs.append(Document(f"s{i:02d}", words(f"s{i}x", 6), headline))
    return docs


@pytest.fixture
def synthetic_admitted(tmp_path):
    """Admitted documents of a 500-article synthetic corpus"""
    path = tmp_path / "corpus.tsv"
    write_corpus(path, generate_corpus(500, seed=11))
    return ingest_corpus(path, FilterConfig()).admitted


class TestRankPseudoQuery:
    """Test suite for the per-article ranking decision"""

    def test_rank_one_with_negatives(self):
        """Test an article at rank 1 keeps the next n_neg hits as negatives"""
        docs = top_of_its_own_query()
        pair = rank_pseudo_query(docs[0], build(docs), FilterConfig(n_neg=6, n_rank=30))

        assert pair == RankedPair("q", 1, ("o0", "o1", "o2", "o3", "o4", "o5"))

    def test_positive_skipped_among_negatives(self):
        """Test an article at rank 2 pulls in the hit below the first n_neg"""
        headline = "k1w k2w k3w k4w k5w k6w"
        docs = [
            Document("q", headline, "k1w k2w k3w k4w k5w other"),
            Document("top", words("top", 6), headline),
        ]
        for i in range(10):
            docs.append(Document(f"n{i}", words(f"n{i}h", 6), f"k1w {words(f'n{i}f', 5)}"))

        pair = rank_pseudo_query(docs[0], build(docs), FilterConfig(n_neg=6))

        assert pair.positive_rank == 2
        assert pair.negative_ids == ("top", "n0", "n1", "n2", "n3", "n4")
        assert "q" not in pair.negative_ids

    def test_discarded_below_n_rank(self):
        """Test an article at rank 31 is dropped with n_rank 30"""
        docs = buried_article()

        assert rank_pseudo_query(docs[0], build(docs), FilterConfig(n_rank=30)) is None

    def test_retained_at_n_rank(self):
        """Test the rank bound is inclusive"""
        docs = buried_article()
        pair = rank_pseudo_query(docs[0], build(docs), FilterConfig(n_rank=31, n_neg=6))

        assert pair.positive_rank == 31
        assert pair.negative_ids == ("s00", "s01", "s02", "s03", "s04", "s05")

    def test_short_negative_list_kept(self):
        """Test fewer than n_neg other hits still yields a pair"""
        docs = [
            Document("q", "one two three four five six", "one two three"),
            Document("other", words("o", 6), "one filler"),
            Document("unrelated", words("u", 6), "nothing shared here"),
        ]
        pair = rank_pseudo_query(docs[0], build(docs), FilterConfig(n_neg=6))

        assert pair == RankedPair("q", 1, ("other",))

    def test_headline_without_match(self):
        """Test an article whose content shares nothing with its headline"""
        docs = [
            Document("q", "one two three four five six", "seven eight"),
            Document("other", words("o", 6), "one"),
        ]

        assert rank_pseudo_query(docs[0], build(docs), FilterConfig()) is None


class TestApplyRankingFilter:
    """Test suite for the corpus-wide ranking filter"""

    def test_matches_exhaustive_ranking(self, synthetic_admitted):
        """Test retained pairs against exhaustive BM25 scoring"""
        expected = oracles.ranking_filter(
            [(d.doc_id, d.headline, d.content) for d in synthetic_admitted], n_rank=30, n_neg=6
        )
        cfg = FilterConfig(n_rank=30, n_neg=6)
        pairs = apply_ranking_filter(synthetic_admitted, build(synthetic_admitted), cfg, workers=1)

        assert {p.query_doc_id: (p.positive_rank, p.negative_ids) for p in pairs} == expected
        assert len(pairs) > 0

    def test_pairs_ordered_by_query_id(self, synthetic_admitted):
        """Test output order is by query_doc_id"""
        pairs = apply_ranking_filter(synthetic_admitted, build(synthetic_admitted), FilterConfig())
        ids = [p.query_doc_id for p in pairs]

        assert ids == sorted(ids)

    def test_invariants(self, synthetic_admitted):
        """Test rank bound, negative count and positive exclusion"""
        cfg = FilterConfig(n_rank=20, n_neg=4)
        pairs = apply_ranking_filter(synthetic_admitted, build(synthetic_admitted), cfg)

        for pair in pairs:
            assert 1 <= pair.positive_rank <= cfg.n_rank
            assert len(pair.negative_ids) <= cfg.n_neg
            assert pair.query_doc_id not in pair.negative_ids
            assert len(set(pair.negative_ids)) == len(pair.negative_ids)

    def test_monotone_in_n_rank(self, synthetic_admitted):
        """Test a larger n_rank never retains fewer articles"""
        index = build(synthetic_admitted)
        retained = []
        for n_rank in (5, 10, 30, 60):
            cfg = FilterConfig(n_rank=n_rank, n_neg=5)
            pairs = apply_ranking_filter(synthetic_admitted, index, cfg, workers=1)
            retained.append({p.query_doc_id for p in pairs})

        for smaller, larger in zip(retained, retained[1:]):
            assert smaller <= larger

    def test_worker_count_does_not_change_output(self, synthetic_admitted):
        """Test sequential and threaded runs agree"""
        index = build(synthetic_admitted)
        cfg = FilterConfig()

        assert apply_ranking_filter(synthetic_admitted, index, cfg, workers=1) == \
            apply_ranking_filter(synthetic_admitted, index, cfg, workers=4)

    def test_empty_corpus(self):
        """Test an empty corpus yields no pairs"""
        assert apply_ranking_filter([], build([]), FilterConfig()) == []


class TestPairsFile:
    """Test suite for reading and writing pairs.tsv"""

    def test_write_format(self, tmp_path):
        """Test the row layout"""
        path = tmp_path / "pairs.tsv"
        write_pairs(path, [RankedPair("d1", 2, ("d7", "d3")), RankedPair("d2", 1, ())])

        assert path.read_text(encoding="utf-8") == "d1\t2\td7,d3\nd2\t1\t\n"

    def test_read_written_pairs(self, tmp_path):
        """Test pairs survive a write and read unchanged"""
        path = tmp_path / "pairs.tsv"
        pairs = [RankedPair("d1", 2, ("d7", "d3")), RankedPair("d2", 1, ())]
        write_pairs(path, pairs)

        assert read_pairs(path) == pairs

    @pytest.mark.parametrize("row, message", [
        ("d1\t2", "expected 3 tab-separated fields"),
        ("d1\tx\td2", "not an integer"),
        ("d1\t0\td2", "invalid pair row"),
    ])
    def test_malformed_rows(self, tmp_path, row, message):
        """Test malformed rows name the file and line"""
        path = tmp_path / "pairs.tsv"
        path.write_text(f"d0\t1\td9\n{row}\n", encoding="utf-8")

        with pytest.raises(PairFormatError, match=message) as exc_info:
            read_pairs(path)
        assert exc_info.value.line_number == 2

    def test_duplicate_query(self, tmp_path):
        """Test a query id may appear only once"""
        path = tmp_path / "pairs.tsv"
        path.write_text("d1\t1\td2\nd1\t3\td4\n", encoding="utf-8")

        with pytest.raises(PairFormatError, match="duplicate query_doc_id d1"):
            read_pairs(path)

    def test_missing_file(self, tmp_path):
        """Test an unreadable file is a format error"""
        with pytest.raises(PairFormatError, match="cannot open file"):
            read_pairs(tmp_path / "absent.tsv")

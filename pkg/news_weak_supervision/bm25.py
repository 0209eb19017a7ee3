"""Inverted index over document contents with BM25 scoring"""

import heapq
import logging
import math
import pickle
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .corpus import CorpusStats, Document, TokenizedText, tokenize
from .exceptions import IndexFormatError, UnknownDocumentError

logger = logging.getLogger(__name__)

INDEX_FORMAT = "news-weak-supervision/bm25"
INDEX_VERSION = 1
DEFAULT_K1 = 1.2
DEFAULT_B = 0.75


@dataclass(frozen=True)
class PostingList:
    """Entries are sorted by doc_id, every term frequency is at least 1"""

    term: str
    entries: Tuple[Tuple[str, int], ...]


@dataclass(frozen=True)
class ScoredHit:
    doc_id: str
    score: float
    rank: int


class BM25Index:
    """
    Immutable BM25 index over document contents

    Headlines are never indexed: they are the queries. Once built the index
    is read-only, so retrieval may run from many threads at once.
    """

    def __init__(
        self,
        postings: Dict[str, Dict[str, int]],
        doc_lengths: Dict[str, int],
        k1: float = DEFAULT_K1,
        b: float = DEFAULT_B,
    ):
        self.k1 = float(k1)
        self.b = float(b)
        self._doc_lengths = dict(doc_lengths)
        self._postings = {
            term: dict(sorted(entries.items())) for term, entries in sorted(postings.items())
        }
        self.doc_count = len(self._doc_lengths)
        total = sum(self._doc_lengths.values())
        self.avgdl = total / self.doc_count if self.doc_count else 0.0
        self._idf = {
            term: self._compute_idf(len(entries)) for term, entries in self._postings.items()
        }

    @classmethod
    def build(
        cls,
        corpus: Iterable[Document],
        stats: CorpusStats,
        k1: float = DEFAULT_K1,
        b: float = DEFAULT_B,
    ) -> "BM25Index":
        """
        Build the index from admitted documents

        Args:
            corpus: Admitted documents
            stats: Statistics computed from the same documents
            k1: Term frequency saturation
            b: Length normalization strength
        """
        postings: Dict[str, Dict[str, int]] = {}
        for doc in corpus:
            for term, tf in Counter(tokenize(doc.content).tokens).items():
                postings.setdefault(term, {})[doc.doc_id] = tf

        index = cls(postings, stats.doc_lengths, k1=k1, b=b)
        logger.info(
            f"Built BM25 index: {index.doc_count} document(s), {len(index)} term(s), "
            f"avgdl {index.avgdl:.2f}"
        )
        return index

    def _compute_idf(self, df: int) -> float:
        # +1 smoothing keeps every IDF positive
        return math.log((self.doc_count - df + 0.5) / (df + 0.5) + 1.0)

    def _term_weight(self, term: str, tf: int, doc_length: int) -> float:
        norm = self.k1 * (1.0 - self.b + self.b * doc_length / self.avgdl)
        return self._idf[term] * tf * (self.k1 + 1.0) / (tf + norm)

    def __len__(self) -> int:
        return len(self._postings)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BM25Index):
            return NotImplemented
        return (
            self.k1 == other.k1
            and self.b == other.b
            and list(self._doc_lengths.items()) == list(other._doc_lengths.items())
            and self._postings == other._postings
        )

    @property
    def terms(self) -> List[str]:
        return list(self._postings)

    @property
    def doc_ids(self) -> List[str]:
        return list(self._doc_lengths)

    def document_frequency(self, term: str) -> int:
        return len(self._postings.get(term, {}))

    def postings(self, term: str) -> PostingList:
        return PostingList(term=term, entries=tuple(self._postings.get(term, {}).items()))

    def bm25_score(self, query: TokenizedText, doc_id: str) -> float:
        """
        Score one document for a query

        Each distinct query term counts once; terms missing from the
        document contribute nothing.

        Raises:
            UnknownDocumentError: If doc_id is not indexed
        """
        if doc_id not in self._doc_lengths:
            raise UnknownDocumentError(doc_id)
        doc_length = self._doc_lengths[doc_id]
        score = 0.0
        for term in dict.fromkeys(query.tokens):
            tf = self._postings.get(term, {}).get(doc_id)
            if tf:
                score += self._term_weight(term, tf, doc_length)
        return score

    def retrieve(self, query: TokenizedText, k: int) -> List[ScoredHit]:
        """
        Return the k best documents with a positive score

        Ordering is score descending, then doc_id ascending.
        """
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")

        # same term order as bm25_score so the float sums are identical
        scores: Dict[str, float] = {}
        for term in dict.fromkeys(query.tokens):
            entries = self._postings.get(term)
            if not entries:
                continue
            for doc_id, tf in entries.items():
                weight = self._term_weight(term, tf, self._doc_lengths[doc_id])
                scores[doc_id] = scores.get(doc_id, 0.0) + weight

        best = heapq.nsmallest(
            k,
            ((score, doc_id) for doc_id, score in scores.items() if score > 0.0),
            key=lambda item: (-item[0], item[1]),
        )
        return [
            ScoredHit(doc_id=doc_id, score=score, rank=rank)
            for rank, (score, doc_id) in enumerate(best, start=1)
        ]

    def retrieve_many(
        self,
        queries: Sequence[TokenizedText],
        k: int,
        workers: Optional[int] = None,
    ) -> List[List[ScoredHit]]:
        """Retrieve for many queries on a thread pool, results in input order"""
        if workers is not None and workers <= 1:
            return [self.retrieve(query, k) for query in queries]
        with ThreadPoolExecutor(max_workers=workers) as executor:
            return list(executor.map(lambda query: self.retrieve(query, k), queries))

    def save(self, path: Union[str, Path]):
        """Serialize the index as primitive data"""
        payload = {
            "format": INDEX_FORMAT,
            "version": INDEX_VERSION,
            "k1": self.k1,
            "b": self.b,
            "doc_lengths": list(self._doc_lengths.items()),
            "postings": {term: list(entries.items()) for term, entries in self._postings.items()},
        }
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("wb") as fh:
            pickle.dump(payload, fh, protocol=4)
        logger.info(f"Saved BM25 index to {path}")

    @classmethod
    def load(cls, path: Union[str, Path]) -> "BM25Index":
        """
        Load an index written by save()

        Raises:
            IndexFormatError: If the file is missing, unreadable or of another format
        """
        try:
            with Path(path).open("rb") as fh:
                payload = pickle.load(fh)
        except OSError as e:
            raise IndexFormatError(f"Failed to read index file {path}: {e}")
        except Exception as e:
            raise IndexFormatError(f"Corrupt index file {path}: {e}")

        if not isinstance(payload, dict) or payload.get("format") != INDEX_FORMAT:
            raise IndexFormatError(f"{path} is not a BM25 index file")
        if payload.get("version") != INDEX_VERSION:
            raise IndexFormatError(
                f"Unsupported index version {payload.get('version')} in {path}"
            )
        try:
            return cls(
                postings={term: dict(entries) for term, entries in payload["postings"].items()},
                doc_lengths=dict(payload["doc_lengths"]),
                k1=payload["k1"],
                b=payload["b"],
            )
        except (KeyError, TypeError, ValueError) as e:
            raise IndexFormatError(f"Incomplete index file {path}: {e}")

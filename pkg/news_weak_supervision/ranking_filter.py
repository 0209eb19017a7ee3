"""Ranking filter: keep pseudo-queries that retrieve their own article, mine hard negatives"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from .bm25 import BM25Index
from .config import FilterConfig
from .corpus import HEADLINE, Document, tokenize
from .exceptions import PairFormatError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


@dataclass(frozen=True)
class RankedPair:
    """A retained pseudo-query with the rank of its own article and its hard negatives"""

    query_doc_id: str
    positive_rank: int
    negative_ids: Tuple[str, ...]


@dataclass(frozen=True)
class RankingFilterReport:
    queries: int
    retained: int

    @property
    def discarded(self) -> int:
        return self.queries - self.retained


def rank_pseudo_query(
    document: Document, index: BM25Index, cfg: FilterConfig
) -> Optional[RankedPair]:
    """
    Apply the ranking filter to one article

    Returns:
        The RankedPair, or None when the article is not retrieved within
        the top n_rank results for its own headline
    """
    hits = index.retrieve(tokenize(document.headline, HEADLINE), cfg.retrieval_depth)
    positive_rank = None
    for hit in hits:
        if hit.doc_id == document.doc_id:
            positive_rank = hit.rank
            break

    if positive_rank is None or positive_rank > cfg.n_rank:
        logger.debug(f"Discarded {document.doc_id}: own article rank {positive_rank}")
        return None

    # the positive is skipped, pulling in the hit just below n_neg
    negatives = [hit.doc_id for hit in hits if hit.doc_id != document.doc_id][:cfg.n_neg]
    return RankedPair(
        query_doc_id=document.doc_id,
        positive_rank=positive_rank,
        negative_ids=tuple(negatives),
    )


def apply_ranking_filter(
    corpus: Iterable[Document],
    index: BM25Index,
    cfg: FilterConfig,
    workers: Optional[int] = None,
) -> List[RankedPair]:
    """
    Run the ranking filter over every admitted article

    Pseudo-queries are independent, so they are scored on a thread pool;
    the output is ordered by query_doc_id whatever the scheduling.

    Args:
        corpus: Admitted documents the index was built over
        index: BM25 index over their contents
        cfg: Filter thresholds (n_rank, n_neg)
        workers: Thread count, None for the executor default

    Returns:
        Retained pairs sorted by query_doc_id
    """
    documents = list(corpus)
    if workers is not None and workers <= 1:
        results = [rank_pseudo_query(doc, index, cfg) for doc in documents]
    else:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(lambda doc: rank_pseudo_query(doc, index, cfg), documents))

    pairs = sorted((pair for pair in results if pair is not None), key=lambda p: p.query_doc_id)
    report = RankingFilterReport(queries=len(documents), retained=len(pairs))
    logger.info(
        f"Ranking filter (n_rank={cfg.n_rank}, n_neg={cfg.n_neg}): "
        f"{report.retained} retained, {report.discarded} discarded"
    )
    return pairs


def write_pairs(path: PathLike, pairs: Sequence[RankedPair]):
    """One row per pair: query_doc_id, positive_rank, comma-joined negative ids"""
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for pair in pairs:
            f.write(f"{pair.query_doc_id}\t{pair.positive_rank}\t{','.join(pair.negative_ids)}\n")


def read_pairs(path: PathLike) -> List[RankedPair]:
    """
    Read a pairs file written by write_pairs()

    Raises:
        PairFormatError: On a malformed row
    """
    path = str(path)
    pairs = []
    seen = set()
    try:
        handle = open(path, "r", encoding="utf-8")
    except OSError as e:
        raise PairFormatError(f"cannot open file: {e}", path=path)

    with handle:
        for line_number, raw in enumerate(handle, start=1):
            line = raw.rstrip("\r\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise PairFormatError(
                    f"expected 3 tab-separated fields, found {len(parts)}",
                    path=path, line_number=line_number,
                )
            query_doc_id, rank_text, negatives_text = parts
            try:
                positive_rank = int(rank_text)
            except ValueError:
                raise PairFormatError(
                    f"positive rank is not an integer: {rank_text!r}",
                    path=path, line_number=line_number,
                )
            if not query_doc_id or positive_rank < 1:
                raise PairFormatError("invalid pair row", path=path, line_number=line_number)
            if query_doc_id in seen:
                raise PairFormatError(
                    f"duplicate query_doc_id {query_doc_id}", path=path, line_number=line_number
                )
            seen.add(query_doc_id)
            negatives = tuple(item for item in negatives_text.split(",") if item)
            pairs.append(RankedPair(query_doc_id, positive_rank, negatives))
    return pairs

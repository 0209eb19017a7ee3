"""Interaction filter: keep pairs whose mock interaction embedding is near a template's"""

import heapq
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Mapping, Optional, Sequence, Set, Tuple, Union

from .config import FilterConfig
from .corpus import (
    CONTENT,
    HEADLINE,
    Corpus,
    Document,
    TokenizedText,
    iter_tsv_records,
    tokenize,
    write_tsv_records,
)
from .exceptions import PairFormatError, TemplateFormatError
from .interaction import EmbeddingTable, InteractionVector, amse, mock_embedding
from .ranking_filter import RankedPair
from .trec_eval import Judgment, query_sort_key

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


@dataclass(frozen=True)
class Template:
    """A query-document pair from the target search domain; no relevance label needed"""

    template_id: str
    query: TokenizedText
    doc: TokenizedText


@dataclass(frozen=True)
class TemplateSet:
    templates: Tuple[Template, ...]

    def __post_init__(self):
        ids = [t.template_id for t in self.templates]
        if len(ids) != len(set(ids)):
            raise TemplateFormatError("template ids must be unique")
        for t in self.templates:
            if not len(t.query) or not len(t.doc):
                raise TemplateFormatError(
                    f"template {t.template_id} has an empty query or document"
                )

    def __len__(self) -> int:
        return len(self.templates)

    def __iter__(self):
        return iter(self.templates)

    @classmethod
    def from_texts(cls, rows: Iterable[Tuple[str, str, str]]) -> "TemplateSet":
        """Tokenize (template_id, query_text, doc_text) rows with the corpus tokenizer"""
        return cls(tuple(
            Template(template_id, tokenize(query, HEADLINE), tokenize(doc, CONTENT))
            for template_id, query, doc in rows
        ))


@dataclass(frozen=True)
class CandidateSet:
    """One mock interaction embedding per ranking-filter survivor"""

    candidates: Tuple[Tuple[str, InteractionVector], ...]

    def __post_init__(self):
        ids = [query_doc_id for query_doc_id, _ in self.candidates]
        if len(ids) != len(set(ids)):
            raise ValueError("candidate ids must be unique")

    def __len__(self) -> int:
        return len(self.candidates)

    @property
    def ids(self) -> List[str]:
        return [query_doc_id for query_doc_id, _ in self.candidates]


def load_templates(path: PathLike) -> TemplateSet:
    """
    Parse template_id<TAB>query_text<TAB>doc_text rows

    Raises:
        TemplateFormatError: On a malformed row, a repeated id or text
            without any token
    """
    rows = []
    seen = set()
    for line_number, template_id, query, doc in iter_tsv_records(path, TemplateFormatError):
        if template_id in seen:
            raise TemplateFormatError(
                f"duplicate template id {template_id}", path=str(path), line_number=line_number
            )
        if not tokenize(query).tokens or not tokenize(doc).tokens:
            raise TemplateFormatError(
                f"template {template_id} has no tokens", path=str(path), line_number=line_number
            )
        seen.add(template_id)
        rows.append((template_id, query, doc))
    templates = TemplateSet.from_texts(rows)
    logger.info(f"Loaded {len(templates)} template(s) from {path}")
    return templates


def templates_from_judgments(
    judgments: Iterable[Judgment],
    topics: Mapping[str, str],
    documents: Mapping[str, Document],
) -> List[Tuple[str, str, str]]:
    """
    Turn every judged query-document pair into a template row, grades ignored

    Pairs whose query text or document is unavailable are skipped.

    Returns:
        (template_id, query_text, doc_text) rows, template_id is "query_id:doc_id"
    """
    rows = []
    skipped = 0
    for j in sorted(judgments, key=lambda j: (query_sort_key(j.query_id), j.doc_id)):
        doc = documents.get(j.doc_id)
        query = topics.get(j.query_id)
        if doc is None or query is None:
            skipped += 1
            continue
        rows.append((f"{j.query_id}:{j.doc_id}", query, f"{doc.headline} {doc.content}"))
    if skipped:
        logger.warning(f"Skipped {skipped} judged pair(s) without query text or document")
    logger.info(f"Built {len(rows)} template(s) from judged pairs")
    return rows


def write_templates(path: PathLike, rows: Iterable[Tuple[str, str, str]]):
    write_tsv_records(path, rows)


def build_candidate_vectors(
    pairs: Sequence[RankedPair],
    corpus: Corpus,
    emb: EmbeddingTable,
    cfg: FilterConfig,
    workers: Optional[int] = None,
) -> CandidateSet:
    """
    Compute the mock interaction embedding of each pair's headline and content

    Raises:
        UnknownDocumentError: If a pair refers to a document missing from the corpus
    """
    def vector(pair: RankedPair) -> Tuple[str, InteractionVector]:
        return pair.query_doc_id, mock_embedding(
            corpus.headline_tokens(pair.query_doc_id),
            corpus.content_tokens(pair.query_doc_id),
            emb,
            cfg.query_pad_length,
        )

    if workers is not None and workers <= 1:
        candidates = [vector(pair) for pair in pairs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            candidates = list(executor.map(vector, pairs))
    return CandidateSet(tuple(candidates))


def nearest_candidates(
    template_vector: InteractionVector,
    candidates: CandidateSet,
    n_sim: int,
) -> List[Tuple[float, str]]:
    """
    The n_sim candidates closest to a template under aMSE

    Ties break by ascending query_doc_id; heapq.nsmallest keeps a bounded
    heap of n_sim entries.
    """
    scored = (
        (amse(template_vector.values, vector.values), query_doc_id)
        for query_doc_id, vector in candidates.candidates
    )
    return heapq.nsmallest(n_sim, scored)


def select_candidates(
    candidates: CandidateSet,
    templates: TemplateSet,
    emb: EmbeddingTable,
    cfg: FilterConfig,
    workers: Optional[int] = None,
) -> List[str]:
    """
    Union over templates of each template's n_sim nearest candidates

    Args:
        candidates: Mock embeddings of the ranking-filter survivors
        templates: Template pairs from the target domain
        emb: Word vectors
        cfg: Filter thresholds (n_sim, query_pad_length)
        workers: Thread count, None for the executor default

    Returns:
        Selected query_doc_ids, sorted
    """
    def neighbours(template: Template) -> List[Tuple[float, str]]:
        vector = mock_embedding(template.query, template.doc, emb, cfg.query_pad_length)
        return nearest_candidates(vector, candidates, cfg.n_sim)

    if not len(candidates) or not len(templates):
        logger.warning("Interaction filter received no candidates or no templates")
        return []

    if workers is not None and workers <= 1:
        per_template = [neighbours(t) for t in templates]
    else:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            per_template = list(executor.map(neighbours, templates))

    selected: Set[str] = set()
    for nearest in per_template:
        selected.update(query_doc_id for _, query_doc_id in nearest)

    logger.info(
        f"Interaction filter (n_sim={cfg.n_sim}, {len(templates)} template(s)): "
        f"{len(selected)} of {len(candidates)} candidate(s) selected"
    )
    return sorted(selected)


def write_selected(path: PathLike, ids: Iterable[str]):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for query_doc_id in sorted(ids):
            f.write(f"{query_doc_id}\n")


def read_selected(path: PathLike) -> List[str]:
    """One query_doc_id per line; blank lines ignored"""
    path = str(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            ids = [line.strip() for line in f if line.strip()]
    except OSError as e:
        raise PairFormatError(f"cannot open file: {e}", path=path)
    return sorted(set(ids))


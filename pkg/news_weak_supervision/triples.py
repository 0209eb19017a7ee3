"""Training triples and seeded batch sampling for downstream rankers"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, List, Optional, Sequence, Union

import numpy as np

from .corpus import Corpus
from .exceptions import PairFormatError, SamplingError
from .ranking_filter import RankedPair

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


@dataclass(frozen=True)
class TrainingTriple:
    """Raw headline text with a positive and a hard negative document id"""

    query_text: str
    positive_id: str
    negative_id: str


def emit_triples(
    pairs: Sequence[RankedPair],
    selected: Optional[Iterable[str]],
    corpus: Corpus,
) -> List[TrainingTriple]:
    """
    One triple per negative of every selected pair

    Args:
        pairs: Ranking-filter output
        selected: query_doc_ids kept by the interaction filter, None keeps all pairs
        corpus: Corpus supplying headline text

    Returns:
        Triples ordered by query_doc_id, then by negative order

    Raises:
        UnknownDocumentError: If a pair refers to a document missing from the corpus
    """
    keep = None if selected is None else set(selected)
    if keep is not None:
        unknown = keep - {pair.query_doc_id for pair in pairs}
        if unknown:
            logger.warning(f"{len(unknown)} selected id(s) have no ranked pair and are ignored")

    triples = []
    retained = 0
    for pair in sorted(pairs, key=lambda p: p.query_doc_id):
        if keep is not None and pair.query_doc_id not in keep:
            continue
        retained += 1
        headline = corpus.get(pair.query_doc_id).headline
        for negative_id in pair.negative_ids:
            corpus.get(negative_id)
            if negative_id == pair.query_doc_id:
                continue
            triples.append(TrainingTriple(headline, pair.query_doc_id, negative_id))

    logger.info(f"Emitted {len(triples)} triple(s) from {retained} pair(s)")
    return triples


def sample_batches(
    triples: Sequence[TrainingTriple],
    batch_size: int,
    iterations: int,
    seed: int,
) -> Iterator[List[TrainingTriple]]:
    """
    Draw training batches uniformly with replacement

    The generator is NumPy's PCG64 seeded with `seed`; each batch takes
    `integers(0, len(triples), size=batch_size)` from it, so a seed fixes
    the whole stream.

    Raises:
        SamplingError: On an empty triple list or non-positive sizes
    """
    if not triples:
        raise SamplingError("cannot sample batches from an empty triple list")
    if batch_size < 1 or iterations < 1:
        raise SamplingError(
            f"batch_size and iterations must be >= 1, got {batch_size} and {iterations}"
        )

    rng = np.random.Generator(np.random.PCG64(seed))
    for _ in range(iterations):
        indices = rng.integers(0, len(triples), size=batch_size)
        yield [triples[i] for i in indices]


def write_triples(path: PathLike, triples: Iterable[TrainingTriple]):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for t in triples:
            f.write(f"{t.query_text}\t{t.positive_id}\t{t.negative_id}\n")


def read_triples(path: PathLike) -> List[TrainingTriple]:
    path = str(path)
    triples = []
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
            if len(parts) != 3 or not all(parts):
                raise PairFormatError(
                    "expected query_text<TAB>positive_id<TAB>negative_id",
                    path=path, line_number=line_number,
                )
            triples.append(TrainingTriple(*parts))
    return triples


def write_batches(path: PathLike, batches: Iterable[List[TrainingTriple]]) -> int:
    """Write iteration<TAB>query_text<TAB>positive_id<TAB>negative_id rows, returns batch count"""
    count = 0
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for iteration, batch in enumerate(batches, start=1):
            count += 1
            for t in batch:
                f.write(f"{iteration}\t{t.query_text}\t{t.positive_id}\t{t.negative_id}\n")
    return count

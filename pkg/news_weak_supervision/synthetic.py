"""Deterministic synthetic corpus, embeddings and templates for tests and demos"""

import logging
from pathlib import Path
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np
import yaml

from .corpus import Document, write_corpus
from .interaction import EmbeddingTable, write_embeddings
from .interaction_filter import write_templates

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

DEFAULT_DOCS = 200
DEFAULT_VOCAB = 300
DEFAULT_DIMENSION = 16
DEFAULT_TEMPLATES = 12


def _rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64([seed, stream]))


def make_vocabulary(size: int = DEFAULT_VOCAB) -> List[str]:
    return [f"term{i:04d}" for i in range(size)]


def _zipf_weights(size: int) -> np.ndarray:
    weights = 1.0 / np.arange(1, size + 1)
    return weights / weights.sum()


def _draw(
    rng: np.random.Generator, vocabulary: Sequence[str], weights: np.ndarray, count: int
) -> List[str]:
    return [vocabulary[i] for i in rng.choice(len(vocabulary), size=count, p=weights)]


def generate_corpus(
    n_docs: int = DEFAULT_DOCS,
    seed: int = 0,
    vocab_size: int = DEFAULT_VOCAB,
) -> List[Document]:
    """
    Headline/content articles with headlines of 4 to 18 tokens

    Content repeats most headline terms, so the majority of headlines
    retrieve their own article; the rest exercise the discard path.
    """
    rng = _rng(seed, 0)
    vocabulary = make_vocabulary(vocab_size)
    weights = _zipf_weights(vocab_size)
    documents = []
    for i in range(n_docs):
        headline = _draw(rng, vocabulary, weights, int(rng.integers(4, 19)))
        kept = [term for term in headline if rng.random() < 0.8]
        filler = _draw(rng, vocabulary, weights, int(rng.integers(20, 60)))
        content = kept + filler
        rng.shuffle(content)
        documents.append(Document(
            doc_id=f"d{i:05d}",
            headline=" ".join(headline).capitalize(),
            content=" ".join(content) + ".",
        ))
    return documents


def generate_embeddings(
    vocabulary: Sequence[str],
    dimension: int = DEFAULT_DIMENSION,
    seed: int = 0,
) -> EmbeddingTable:
    """Gaussian vectors rounded to 6 decimals so the text format round-trips"""
    rng = _rng(seed, 1)
    matrix = np.round(rng.standard_normal((len(vocabulary), dimension)), 6)
    vectors: Dict[str, np.ndarray] = {token: matrix[i] for i, token in enumerate(vocabulary)}
    return EmbeddingTable(dimension, vectors)


def generate_templates(
    n_templates: int = DEFAULT_TEMPLATES,
    seed: int = 0,
    vocabulary: Sequence[str] = (),
) -> List[Tuple[str, str, str]]:
    """Short queries paired with documents that mention part of the query"""
    vocabulary = list(vocabulary) or make_vocabulary()
    weights = _zipf_weights(len(vocabulary))
    rng = _rng(seed, 2)
    rows = []
    for i in range(n_templates):
        query = _draw(rng, vocabulary, weights, int(rng.integers(2, 7)))
        doc = [term for term in query if rng.random() < 0.6]
        doc += _draw(rng, vocabulary, weights, int(rng.integers(30, 80)))
        rng.shuffle(doc)
        rows.append((f"t{i:03d}", " ".join(query), " ".join(doc)))
    return rows


def generate_bundle(
    out_dir: PathLike,
    n_docs: int = DEFAULT_DOCS,
    seed: int = 0,
    vocab_size: int = DEFAULT_VOCAB,
    n_templates: int = DEFAULT_TEMPLATES,
) -> Dict[str, Path]:
    """
    Write corpus.tsv, embeddings.txt, templates.tsv and a pipeline.yaml using them

    Returns:
        Mapping of artifact name to written path
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    vocabulary = make_vocabulary(vocab_size)
    paths = {
        "corpus": out_dir / "corpus.tsv",
        "embeddings": out_dir / "embeddings.txt",
        "templates": out_dir / "templates.tsv",
        "config": out_dir / "pipeline.yaml",
    }
    write_corpus(paths["corpus"], generate_corpus(n_docs, seed, vocab_size))
    write_embeddings(paths["embeddings"], generate_embeddings(vocabulary, seed=seed))
    write_templates(paths["templates"], generate_templates(n_templates, seed, vocabulary))
    with open(paths["config"], "w", encoding="utf-8") as f:
        yaml.safe_dump(
            {
                "corpus": "corpus.tsv",
                "embeddings": "embeddings.txt",
                "templates": "templates.tsv",
                "output_dir": "output",
                "seed": seed,
            },
            f,
            sort_keys=False,
        )
    logger.info(f"Wrote synthetic bundle ({n_docs} documents, seed {seed}) to {out_dir}")
    return paths

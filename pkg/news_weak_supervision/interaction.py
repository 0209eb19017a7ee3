"""Similarity matrices, mock interaction embeddings and aligned distances"""

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Sequence, Union

import numpy as np

from .corpus import TokenizedText
from .exceptions import EmbeddingFormatError, VectorLengthError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
VectorLike = Union[Sequence[float], np.ndarray]


class EmbeddingTable:
    """Word vectors of one fixed dimension"""

    def __init__(self, dimension: int, vectors: Dict[str, np.ndarray]):
        self.dimension = dimension
        self._vectors = {}
        for token, vector in vectors.items():
            array = np.asarray(vector, dtype=np.float64)
            if array.shape != (dimension,):
                raise EmbeddingFormatError(
                    f"vector for {token!r} has shape {array.shape}, expected ({dimension},)"
                )
            if not np.all(np.isfinite(array)):
                raise EmbeddingFormatError(f"vector for {token!r} has non-finite components")
            self._vectors[token] = array

    def __len__(self) -> int:
        return len(self._vectors)

    def __contains__(self, token: object) -> bool:
        return token in self._vectors

    @property
    def vocabulary(self) -> list:
        return list(self._vectors)

    def get(self, token: str):
        return self._vectors.get(token)

    def cosine(self, first: str, second: str) -> float:
        """Cosine of two tokens; out-of-vocabulary or zero-norm vectors give 0.0"""
        a = self._vectors.get(first)
        b = self._vectors.get(second)
        if a is None or b is None:
            return 0.0
        return cosine(a, b)

    def matrix(self, tokens: Sequence[str]) -> np.ndarray:
        """Stack unit-normalized vectors; OOV and zero-norm rows are all zeros"""
        rows = np.zeros((len(tokens), self.dimension), dtype=np.float64)
        for i, token in enumerate(tokens):
            vector = self._vectors.get(token)
            if vector is None:
                continue
            norm = np.linalg.norm(vector)
            if norm > 0.0:
                rows[i] = vector / norm
        return rows


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    norm = float(np.linalg.norm(a) * np.linalg.norm(b))
    if norm == 0.0:
        return 0.0
    return float(np.clip(np.dot(a, b) / norm, -1.0, 1.0))


def load_embeddings(path: PathLike) -> EmbeddingTable:
    """
    Load word vectors in the text interchange format

    The first line holds "<vocab_size> <dimension>", each following line a
    token and its components separated by spaces. A repeated token keeps
    its first vector.

    Raises:
        EmbeddingFormatError: On a malformed header or row, naming the line
    """
    path = str(path)
    vectors: Dict[str, np.ndarray] = {}
    try:
        handle = open(path, "r", encoding="utf-8")
    except OSError as e:
        raise EmbeddingFormatError(f"cannot open file: {e}", path=path)

    with handle:
        header = handle.readline().split()
        if len(header) != 2:
            raise EmbeddingFormatError(
                "header must be '<vocab_size> <dimension>'", path=path, line_number=1
            )
        try:
            vocab_size, dimension = int(header[0]), int(header[1])
        except ValueError:
            raise EmbeddingFormatError("header values must be integers", path=path, line_number=1)
        if dimension < 1 or vocab_size < 0:
            raise EmbeddingFormatError("header values out of range", path=path, line_number=1)

        for line_number, raw in enumerate(handle, start=2):
            parts = raw.rstrip("\r\n").split(" ")
            parts = [part for part in parts if part]
            if not parts:
                continue
            token, components = parts[0], parts[1:]
            if len(components) != dimension:
                raise EmbeddingFormatError(
                    f"expected {dimension} components for {token!r}, found {len(components)}",
                    path=path, line_number=line_number,
                )
            try:
                values = [float(component) for component in components]
            except ValueError:
                raise EmbeddingFormatError(
                    f"non-numeric component in vector for {token!r}",
                    path=path, line_number=line_number,
                )
            if not all(math.isfinite(value) for value in values):
                raise EmbeddingFormatError(
                    f"non-finite component in vector for {token!r}",
                    path=path, line_number=line_number,
                )
            if token in vectors:
                logger.debug(f"{path}:{line_number}: repeated token {token!r} ignored")
                continue
            vectors[token] = np.array(values, dtype=np.float64)

    if len(vectors) != vocab_size:
        logger.warning(f"{path}: header announces {vocab_size} word(s), read {len(vectors)}")
    logger.info(f"Loaded {len(vectors)} embedding(s) of dimension {dimension} from {path}")
    return EmbeddingTable(dimension, vectors)


def write_embeddings(path: PathLike, table: EmbeddingTable):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(f"{len(table)} {table.dimension}\n")
        for token in table.vocabulary:
            f.write(token + " " + " ".join(repr(float(x)) for x in table.get(token)) + "\n")


@dataclass(frozen=True, eq=False)
class SimilarityMatrix:
    """Query terms by document terms, every cell in [-1, 1]"""

    query: TokenizedText
    doc: TokenizedText
    values: np.ndarray

    @property
    def shape(self):
        return self.values.shape


@dataclass(frozen=True, eq=False)
class InteractionVector:
    """Per-query-term maximum similarity, zero-padded to a fixed length"""

    values: np.ndarray
    active_length: int

    @property
    def active(self) -> np.ndarray:
        return self.values[:self.active_length]

    def __len__(self) -> int:
        return len(self.values)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, InteractionVector):
            return NotImplemented
        return (
            self.active_length == other.active_length
            and np.array_equal(self.values, other.values)
        )


def similarity_matrix(q: TokenizedText, d: TokenizedText, emb: EmbeddingTable) -> SimilarityMatrix:
    """
    Cosine similarity of every query term against every document term

    Identical strings score 1.0 even when out of vocabulary; any other pair
    with an out-of-vocabulary side scores 0.0.
    """
    q_tokens, d_tokens = list(q.tokens), list(d.tokens)
    values = np.clip(emb.matrix(q_tokens) @ emb.matrix(d_tokens).T, -1.0, 1.0)
    if values.size:
        identical = np.array([[qt == dt for dt in d_tokens] for qt in q_tokens], dtype=bool)
        values[identical] = 1.0
    return SimilarityMatrix(query=q, doc=d, values=values)


def interaction_vector(similarities: np.ndarray, pad: int) -> InteractionVector:
    """
    Keep the strongest signal of each query term

    Rows beyond pad are truncated, the tail is padded with 0.0.
    """
    similarities = np.asarray(similarities, dtype=np.float64)
    active = min(similarities.shape[0], pad)
    values = np.zeros(pad, dtype=np.float64)
    if active and similarities.shape[1]:
        values[:active] = similarities[:active].max(axis=1)
    return InteractionVector(values=values, active_length=active)


def mock_embedding(
    q: TokenizedText,
    d: TokenizedText,
    emb: EmbeddingTable,
    pad: int,
) -> InteractionVector:
    """
    Build the mock interaction embedding of a query-document pair

    Args:
        q: Query tokens, truncated to pad
        d: Document tokens
        emb: Word vectors
        pad: Fixed vector length

    Returns:
        InteractionVector of length pad
    """
    truncated = TokenizedText(tokens=q.tokens[:pad], source_field=q.source_field)
    return interaction_vector(similarity_matrix(truncated, d, emb).values, pad)


def _as_vector(vec: VectorLike) -> np.ndarray:
    return np.asarray(vec, dtype=np.float64).reshape(-1)


def shift(vec: VectorLike, s: int) -> np.ndarray:
    """
    Rotate vec circularly by s positions, shift([1, 2, 3], 1) == [3, 1, 2]

    Raises:
        VectorLengthError: Unless 0 <= s < len(vec)
    """
    array = _as_vector(vec)
    if not 0 <= s < len(array):
        raise VectorLengthError(f"shift {s} out of range for vector of length {len(array)}")
    return np.roll(array, s)


def _check_lengths(a: np.ndarray, b: np.ndarray):
    if len(a) != len(b):
        raise VectorLengthError(f"vector lengths differ: {len(a)} != {len(b)}")
    if len(a) == 0:
        raise VectorLengthError("vectors must not be empty")


def mse(a: VectorLike, b: VectorLike) -> float:
    """Mean squared error of two equal-length vectors"""
    a, b = _as_vector(a), _as_vector(b)
    _check_lengths(a, b)
    return float(np.mean((a - b) ** 2))


def rotation_errors(a: VectorLike, b: VectorLike) -> np.ndarray:
    """MSE of a against every rotation of b, indexed by shift"""
    a, b = _as_vector(a), _as_vector(b)
    _check_lengths(a, b)
    n = len(b)
    rotations = b[(np.arange(n)[None, :] - np.arange(n)[:, None]) % n]
    return np.mean((a - rotations) ** 2, axis=1)


def amse(a: VectorLike, b: VectorLike) -> float:
    """Aligned MSE: the smallest MSE of a against any rotation of b"""
    return float(rotation_errors(a, b).min())


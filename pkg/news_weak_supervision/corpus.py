"""Corpus loading, tokenization and headline admission"""

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, NamedTuple, Tuple, Type, Union

from .config import FilterConfig
from .exceptions import (
    CorpusFormatError,
    DuplicateDocumentError,
    LineFormatError,
    UnknownDocumentError,
)

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

# underscore counts as a separator, \W alone would keep it
_SEPARATORS = re.compile(r"[\W_]+")

HEADLINE = "headline"
CONTENT = "content"


@dataclass(frozen=True)
class TokenizedText:
    """Normalized token stream of one text field"""

    tokens: Tuple[str, ...]
    source_field: str = CONTENT

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self) -> Iterator[str]:
        return iter(self.tokens)


@dataclass(frozen=True)
class Document:
    """One news article: the headline is the pseudo-query, the content the pseudo-document"""

    doc_id: str
    headline: str
    content: str


@dataclass(frozen=True)
class CorpusStats:
    doc_count: int
    total_content_tokens: int
    avg_content_length: float
    doc_lengths: Dict[str, int] = field(default_factory=dict)


class IngestResult(NamedTuple):
    admitted: List[Document]
    stats: CorpusStats
    rejected_count: int


def tokenize(text: str, source_field: str = CONTENT) -> TokenizedText:
    """
    Lowercase the text and split it on every run of non-alphanumeric characters

    The same rule serves indexing, both filters and the templates, so every
    component sees one token stream.
    """
    tokens = tuple(token for token in _SEPARATORS.split(text.lower()) if token)
    return TokenizedText(tokens=tokens, source_field=source_field)


def iter_tsv_records(
    path: PathLike,
    error_cls: Type[LineFormatError] = CorpusFormatError,
) -> Iterator[Tuple[int, str, str, str]]:
    """
    Yield (line_number, id, first_text, second_text) from a three-column TSV file

    Blank lines are skipped. Every other line must carry exactly three
    tab-separated, non-empty fields. Whitespace runs inside the two text
    fields collapse to single spaces, so a record read back from
    write_tsv_records is unchanged.

    Raises:
        LineFormatError: error_cls naming the path and line number
    """
    path = str(path)
    try:
        handle = open(path, "r", encoding="utf-8")
    except OSError as e:
        raise error_cls(f"cannot open file: {e}", path=path)

    with handle:
        try:
            for line_number, raw in enumerate(handle, start=1):
                line = raw.rstrip("\r\n")
                if not line.strip():
                    continue
                parts = line.split("\t")
                if len(parts) != 3:
                    raise error_cls(
                        f"expected 3 tab-separated fields, found {len(parts)}",
                        path=path, line_number=line_number,
                    )
                record_id = parts[0].strip()
                first, second = (" ".join(part.split()) for part in parts[1:])
                if not record_id or not first or not second:
                    raise error_cls("empty field", path=path, line_number=line_number)
                yield line_number, record_id, first, second
        except UnicodeDecodeError as e:
            raise error_cls(f"file is not valid UTF-8: {e}", path=path)


def read_corpus(path: PathLike) -> List[Document]:
    """
    Parse every record of a corpus file in file order

    Raises:
        CorpusFormatError: On a malformed line or a doc_id holding a comma
        DuplicateDocumentError: When a doc_id occurs twice
    """
    documents = []
    seen = set()
    for line_number, doc_id, headline, content in iter_tsv_records(path, CorpusFormatError):
        if "," in doc_id:
            raise CorpusFormatError(
                f"doc_id '{doc_id}' contains a comma", path=str(path), line_number=line_number
            )
        if doc_id in seen:
            raise DuplicateDocumentError(doc_id)
        seen.add(doc_id)
        documents.append(Document(doc_id=doc_id, headline=headline, content=content))
    return documents


def write_tsv_records(path: PathLike, records: Iterable[Tuple[str, str, str]]):
    """Write three-column records, tabs and newlines inside fields flattened to spaces"""
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for record in records:
            f.write("\t".join(" ".join(value.split()) for value in record) + "\n")


def write_corpus(path: PathLike, documents: Iterable[Document]):
    write_tsv_records(path, ((doc.doc_id, doc.headline, doc.content) for doc in documents))


def compute_stats(documents: Iterable[Document]) -> CorpusStats:
    doc_lengths = {doc.doc_id: len(tokenize(doc.content)) for doc in documents}
    total = sum(doc_lengths.values())
    count = len(doc_lengths)
    return CorpusStats(
        doc_count=count,
        total_content_tokens=total,
        avg_content_length=total / count if count else 0.0,
        doc_lengths=doc_lengths,
    )


def admits_headline(headline: str, cfg: FilterConfig) -> bool:
    """Bounds are inclusive on both ends"""
    length = len(tokenize(headline, HEADLINE))
    return cfg.min_headline_tokens <= length <= cfg.max_headline_tokens


def ingest_corpus(path: PathLike, cfg: FilterConfig) -> IngestResult:
    """
    Load a corpus and keep documents whose headline length fits the bounds

    Args:
        path: Corpus TSV file
        cfg: Filter configuration supplying the headline bounds

    Returns:
        IngestResult with admitted documents in file order, statistics over
        the admitted documents and the number of rejected records
    """
    documents = read_corpus(path)
    admitted = [doc for doc in documents if admits_headline(doc.headline, cfg)]
    rejected = len(documents) - len(admitted)
    stats = compute_stats(admitted)

    logger.info(
        f"Ingested {len(documents)} record(s) from {path}: "
        f"{len(admitted)} admitted, {rejected} rejected by headline length "
        f"[{cfg.min_headline_tokens}, {cfg.max_headline_tokens}]"
    )
    return IngestResult(admitted=admitted, stats=stats, rejected_count=rejected)


class Corpus:
    """Immutable view over admitted documents with cached token streams"""

    def __init__(self, documents: Iterable[Document]):
        self._documents: List[Document] = []
        self._by_id: Dict[str, Document] = {}
        for doc in documents:
            if doc.doc_id in self._by_id:
                raise DuplicateDocumentError(doc.doc_id)
            self._documents.append(doc)
            self._by_id[doc.doc_id] = doc
        self._headlines = {d.doc_id: tokenize(d.headline, HEADLINE) for d in self._documents}
        self._contents = {d.doc_id: tokenize(d.content, CONTENT) for d in self._documents}

    @classmethod
    def from_file(cls, path: PathLike) -> "Corpus":
        """Load every record of an already-filtered corpus file"""
        return cls(read_corpus(path))

    def __len__(self) -> int:
        return len(self._documents)

    def __iter__(self) -> Iterator[Document]:
        return iter(self._documents)

    def __contains__(self, doc_id: object) -> bool:
        return doc_id in self._by_id

    @property
    def documents(self) -> List[Document]:
        return list(self._documents)

    def get(self, doc_id: str) -> Document:
        try:
            return self._by_id[doc_id]
        except KeyError:
            raise UnknownDocumentError(doc_id)

    def headline_tokens(self, doc_id: str) -> TokenizedText:
        try:
            return self._headlines[doc_id]
        except KeyError:
            raise UnknownDocumentError(doc_id)

    def content_tokens(self, doc_id: str) -> TokenizedText:
        try:
            return self._contents[doc_id]
        except KeyError:
            raise UnknownDocumentError(doc_id)

    def stats(self) -> CorpusStats:
        return compute_stats(self._documents)

"""Shared fixtures"""

import pytest

from news_weak_supervision.config import FilterConfig


def words(prefix: str, count: int) -> str:
    """A text of `count` distinct tokens"""
    return " ".join(f"{prefix}{i}" for i in range(count))


@pytest.fixture
def filter_config():
    return FilterConfig()


@pytest.fixture
def write_tsv(tmp_path):
    """Write three-column rows to a TSV file under tmp_path"""
    def _write(rows, name="corpus.tsv"):
        path = tmp_path / name
        path.write_text("".join("\t".join(row) + "\n" for row in rows), encoding="utf-8")
        return path
    return _write


@pytest.fixture
def write_embedding_file(tmp_path):
    """Write a text-format embedding file from a token -> components mapping"""
    def _write(vectors, name="embeddings.txt"):
        dimension = len(next(iter(vectors.values()))) if vectors else 1
        lines = [f"{len(vectors)} {dimension}"]
        for token, values in vectors.items():
            lines.append(token + " " + " ".join(str(x) for x in values))
        path = tmp_path / name
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return path
    return _write

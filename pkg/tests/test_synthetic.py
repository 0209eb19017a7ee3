"""Tests for the synthetic corpus generator"""

import numpy as np
import yaml

from news_weak_supervision.config import Config, FilterConfig
from news_weak_supervision.corpus import admits_headline, read_corpus, tokenize
from news_weak_supervision.interaction import load_embeddings
from news_weak_supervision.interaction_filter import load_templates
from news_weak_supervision.synthetic import (
    generate_bundle,
    generate_corpus,
    generate_embeddings,
    generate_templates,
    make_vocabulary,
)


class TestGenerators:
    """Test suite for the individual generators"""

    def test_corpus_shape(self):
        docs = generate_corpus(100, seed=4)

        assert [d.doc_id for d in docs] == [f"d{i:05d}" for i in range(100)]
        assert all(4 <= len(tokenize(d.headline)) <= 18 for d in docs)
        assert all(d.content.endswith(".") for d in docs)

    def test_corpus_exercises_admission(self):
        """Test both admitted and rejected headlines occur"""
        cfg = FilterConfig()
        admitted = [admits_headline(d.headline, cfg) for d in generate_corpus(200, seed=0)]

        assert any(admitted)
        assert not all(admitted)

    def test_corpus_deterministic(self):
        assert generate_corpus(30, seed=8) == generate_corpus(30, seed=8)
        assert generate_corpus(30, seed=8) != generate_corpus(30, seed=9)

    def test_embeddings_cover_vocabulary(self):
        vocabulary = make_vocabulary(50)
        table = generate_embeddings(vocabulary, dimension=8, seed=1)

        assert table.vocabulary == vocabulary
        assert table.dimension == 8
        assert np.array_equal(table.get("term0000"), np.round(table.get("term0000"), 6))

    def test_templates_unique_ids(self):
        rows = generate_templates(12, seed=3, vocabulary=make_vocabulary(40))

        assert [row[0] for row in rows] == [f"t{i:03d}" for i in range(12)]
        assert all(row[1] and row[2] for row in rows)


class TestBundle:
    """Test suite for the written bundle"""

    def test_bundle_loads(self, tmp_path):
        """Test every written file parses with the package readers"""
        paths = generate_bundle(tmp_path / "demo", n_docs=40, seed=2, n_templates=5)

        assert len(read_corpus(paths["corpus"])) == 40
        assert len(load_embeddings(paths["embeddings"])) == 300
        assert len(load_templates(paths["templates"])) == 5

        config = Config(str(paths["config"]))
        config.validate_paths()
        assert config.corpus_path == paths["corpus"].resolve()
        assert config.seed == 2

    def test_config_paths_relative(self, tmp_path):
        paths = generate_bundle(tmp_path / "demo", n_docs=10)
        data = yaml.safe_load(paths["config"].read_text(encoding="utf-8"))

        assert data["corpus"] == "corpus.tsv"
        assert data["output_dir"] == "output"

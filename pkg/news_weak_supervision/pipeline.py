"""Stage orchestration: ingest, index, ranking filter, interaction filter, emit"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, TypeVar

from .bm25 import BM25Index
from .config import Config
from .corpus import Corpus, ingest_corpus, write_corpus
from .exceptions import StageError, WeakSupervisionError
from .interaction import load_embeddings
from .interaction_filter import (
    build_candidate_vectors,
    load_templates,
    select_candidates,
    write_selected,
)
from .logger import setup_logger
from .ranking_filter import RankedPair, apply_ranking_filter, write_pairs
from .triples import emit_triples, sample_batches, write_batches, write_triples

T = TypeVar("T")

ADMITTED_FILE = "admitted.tsv"
INDEX_FILE = "index.pkl"
PAIRS_FILE = "pairs.tsv"
SELECTED_FILE = "selected.txt"
TRIPLES_FILE = "triples.tsv"
BATCHES_FILE = "batches.tsv"


@dataclass
class PipelineReport:
    """Counts and artifacts of one pipeline run"""

    parsed: int = 0
    admitted: int = 0
    rejected: int = 0
    retained_pairs: int = 0
    discarded_pairs: int = 0
    selected: Optional[int] = None
    triples: int = 0
    batches: int = 0
    artifacts: Dict[str, Path] = field(default_factory=dict)

    def summary_lines(self) -> List[str]:
        selected = "skipped" if self.selected is None else self.selected
        rows = [
            ("Records parsed", self.parsed),
            ("Headlines admitted", self.admitted),
            ("Headlines rejected", self.rejected),
            ("Pairs retained (rank)", self.retained_pairs),
            ("Pairs discarded (rank)", self.discarded_pairs),
            ("Pairs selected (interaction)", selected),
            ("Training triples", self.triples),
            ("Sampled batches", self.batches),
        ]
        width = max(len(label) for label, _ in rows) + 1
        return [f"{label + ':':<{width}} {value}" for label, value in rows]


class WeakSupervisionPipeline:
    """Runs every stage in order and writes each stage's file"""

    def __init__(
        self,
        config: Config,
        logger: Optional[logging.Logger] = None,
        workers: Optional[int] = None,
        seed: Optional[int] = None,
        skip_interaction_filter: bool = False,
    ):
        """
        Initialize the pipeline

        Args:
            config: Configuration object
            logger: Optional logger instance (for testing)
            workers: Thread count per stage, config value by default
            seed: Batch sampling seed, config value by default
            skip_interaction_filter: Emit triples for every ranking-filter survivor
        """
        self.config = config
        self.logger = logger or setup_logger(log_level=config.log_level, log_file=config.log_file)
        self.workers = workers or config.workers
        self.seed = config.seed if seed is None else seed
        self.skip_interaction_filter = skip_interaction_filter
        self.output_dir = Path(config.output_dir)

    def _stage(self, name: str, action: Callable[[], T]) -> T:
        self.logger.info(f"Stage '{name}' started")
        try:
            result = action()
        except StageError:
            raise
        except (WeakSupervisionError, OSError, ValueError) as e:
            self.logger.error(f"Stage '{name}' failed: {e}")
            raise StageError(name, e) from e
        self.logger.info(f"Stage '{name}' finished")
        return result

    def run(self) -> PipelineReport:
        """
        Execute the complete pipeline

        Returns:
            PipelineReport with counts and written files

        Raises:
            StageError: Naming the first stage that failed
        """
        cfg = self.config.filter
        report = PipelineReport()
        out = self.output_dir

        self.logger.info("=" * 60)
        self.logger.info("Starting weak supervision pipeline")
        self.logger.info("=" * 60)

        self._stage("validate", lambda: self.config.validate_paths(
            require_interaction=not self.skip_interaction_filter
        ))
        self._stage("prepare", lambda: out.mkdir(parents=True, exist_ok=True))

        ingested = self._stage("ingest", lambda: ingest_corpus(self.config.corpus_path, cfg))
        report.admitted = len(ingested.admitted)
        report.rejected = ingested.rejected_count
        report.parsed = report.admitted + report.rejected
        report.artifacts["admitted"] = out / ADMITTED_FILE
        self._stage("ingest", lambda: write_corpus(report.artifacts["admitted"], ingested.admitted))
        corpus = Corpus(ingested.admitted)

        index = self._stage(
            "index", lambda: BM25Index.build(ingested.admitted, ingested.stats, k1=cfg.k1, b=cfg.b)
        )
        report.artifacts["index"] = out / INDEX_FILE
        self._stage("index", lambda: index.save(report.artifacts["index"]))

        pairs = self._stage(
            "filter rank", lambda: apply_ranking_filter(corpus, index, cfg, workers=self.workers)
        )
        report.retained_pairs = len(pairs)
        report.discarded_pairs = report.admitted - len(pairs)
        report.artifacts["pairs"] = out / PAIRS_FILE
        self._stage("filter rank", lambda: write_pairs(report.artifacts["pairs"], pairs))

        selected = None
        if self.skip_interaction_filter:
            self.logger.info("Interaction filter skipped, keeping every ranked pair")
        else:
            selected = self._stage("filter interaction", lambda: self._interaction(corpus, pairs))
            report.selected = len(selected)
            report.artifacts["selected"] = out / SELECTED_FILE
            self._stage(
                "filter interaction",
                lambda: write_selected(report.artifacts["selected"], selected),
            )

        triples = self._stage("emit", lambda: emit_triples(pairs, selected, corpus))
        report.triples = len(triples)
        report.artifacts["triples"] = out / TRIPLES_FILE
        self._stage("emit", lambda: write_triples(report.artifacts["triples"], triples))

        if triples:
            report.artifacts["batches"] = out / BATCHES_FILE
            report.batches = self._stage("sample", lambda: write_batches(
                report.artifacts["batches"],
                sample_batches(triples, self.config.batch_size, self.config.iterations, self.seed),
            ))
        else:
            self.logger.warning("No triples emitted, batch sampling skipped")

        self.logger.info("=" * 60)
        self.logger.info("Pipeline completed successfully")
        self.logger.info("=" * 60)
        return report

    def _interaction(self, corpus: Corpus, pairs: Sequence[RankedPair]) -> List[str]:
        cfg = self.config.filter
        embeddings = load_embeddings(self.config.embeddings_path)
        templates = load_templates(self.config.templates_path)
        candidates = build_candidate_vectors(pairs, corpus, embeddings, cfg, workers=self.workers)
        return select_candidates(candidates, templates, embeddings, cfg, workers=self.workers)


def run_pipeline(
    config_path: str,
    workers: Optional[int] = None,
    seed: Optional[int] = None,
    skip_interaction_filter: bool = False,
) -> PipelineReport:
    """Load a config file and run every stage"""
    config = Config(config_path)
    return WeakSupervisionPipeline(
        config, workers=workers, seed=seed, skip_interaction_filter=skip_interaction_filter
    ).run()

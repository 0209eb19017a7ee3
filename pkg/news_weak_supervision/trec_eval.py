"""TREC qrels/run handling, re-ranking and ERR@k / nDCG@k evaluation"""

import logging
import math
import re
from collections import OrderedDict
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Tuple, Union

from .exceptions import TrecFormatError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

DEFAULT_CUTOFF = 20
DEFAULT_G_MAX = 4
DEFAULT_RERANK_DEPTH = 100
METRIC_PATTERN = re.compile(r"^(err|ndcg)@(\d+)$")


@dataclass(frozen=True)
class Judgment:
    query_id: str
    doc_id: str
    grade: int


@dataclass(frozen=True)
class RunEntry:
    query_id: str
    doc_id: str
    rank: int
    score: float
    tag: str


@dataclass(frozen=True)
class MetricResult:
    """Per-query values and their arithmetic mean over evaluated queries"""

    name: str
    per_query: Dict[str, float]

    @property
    def mean(self) -> float:
        if not self.per_query:
            return 0.0
        return math.fsum(self.per_query.values()) / len(self.per_query)


@dataclass(frozen=True)
class RunComparison:
    metric: str
    system_mean: float
    baseline_mean: float
    wins: int
    losses: int
    ties: int

    @property
    def improvement_pct(self) -> Optional[float]:
        """Relative improvement of the mean over the baseline mean, None for a zero baseline"""
        if self.baseline_mean == 0.0:
            return None
        return 100.0 * (self.system_mean - self.baseline_mean) / self.baseline_mean


def _iter_rows(path: PathLike, width: int) -> Iterator[Tuple[int, List[str]]]:
    path = str(path)
    try:
        handle = open(path, "r", encoding="utf-8")
    except OSError as e:
        raise TrecFormatError(f"cannot open file: {e}", path=path)
    with handle:
        for line_number, line in enumerate(handle, start=1):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != width:
                raise TrecFormatError(
                    f"expected {width} whitespace-separated fields, found {len(parts)}",
                    path=path, line_number=line_number,
                )
            yield line_number, parts


def parse_qrels(path: PathLike) -> List[Judgment]:
    """
    Parse "query_id 0 doc_id grade" rows

    Raises:
        TrecFormatError: On a malformed row or a repeated (query_id, doc_id)
    """
    judgments = []
    seen = set()
    for line_number, (query_id, _, doc_id, grade_text) in _iter_rows(path, 4):
        try:
            grade = int(grade_text)
        except ValueError:
            raise TrecFormatError(
                f"grade is not an integer: {grade_text!r}", path=str(path), line_number=line_number
            )
        if (query_id, doc_id) in seen:
            raise TrecFormatError(
                f"duplicate judgment for ({query_id}, {doc_id})",
                path=str(path), line_number=line_number,
            )
        seen.add((query_id, doc_id))
        judgments.append(Judgment(query_id=query_id, doc_id=doc_id, grade=grade))
    logger.debug(f"Parsed {len(judgments)} judgment(s) from {path}")
    return judgments


def parse_run(path: PathLike) -> List[RunEntry]:
    """
    Parse "query_id Q0 doc_id rank score tag" rows

    Within a query ranks must run 1, 2, ... without gaps and scores must not
    increase with rank. Entries come back grouped by query (first appearance
    order) and sorted by rank.

    Raises:
        TrecFormatError: On a malformed row or a violated ranking invariant
    """
    path = str(path)
    by_query: "OrderedDict[str, List[Tuple[int, RunEntry]]]" = OrderedDict()
    for line_number, (query_id, _, doc_id, rank_text, score_text, tag) in _iter_rows(path, 6):
        try:
            rank = int(rank_text)
            score = float(score_text)
        except ValueError:
            raise TrecFormatError(
                f"invalid rank or score: {rank_text!r} {score_text!r}",
                path=path, line_number=line_number,
            )
        if not math.isfinite(score):
            raise TrecFormatError(
                f"score is not finite: {score_text}", path=path, line_number=line_number
            )
        by_query.setdefault(query_id, []).append(
            (line_number, RunEntry(query_id, doc_id, rank, score, tag))
        )

    entries = []
    for query_id, rows in by_query.items():
        rows.sort(key=lambda row: row[1].rank)
        seen_docs = set()
        previous_score = math.inf
        for expected_rank, (line_number, entry) in enumerate(rows, start=1):
            if entry.rank != expected_rank:
                raise TrecFormatError(
                    f"query {query_id}: expected rank {expected_rank}, found {entry.rank}",
                    path=path, line_number=line_number,
                )
            if entry.doc_id in seen_docs:
                raise TrecFormatError(
                    f"query {query_id}: document {entry.doc_id} ranked twice",
                    path=path, line_number=line_number,
                )
            if entry.score > previous_score:
                raise TrecFormatError(
                    f"query {query_id}: score increases at rank {entry.rank}",
                    path=path, line_number=line_number,
                )
            seen_docs.add(entry.doc_id)
            previous_score = entry.score
            entries.append(entry)
    logger.debug(f"Parsed {len(entries)} run row(s) for {len(by_query)} query id(s) from {path}")
    return entries


def write_run(path: PathLike, entries: Iterable[RunEntry]):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for e in entries:
            f.write(f"{e.query_id} Q0 {e.doc_id} {e.rank} {e.score!r} {e.tag}\n")


def read_scores(path: PathLike) -> Dict[Tuple[str, str], float]:
    """Parse "query_id doc_id score" rows produced by an external re-ranker"""
    scores = {}
    for line_number, (query_id, doc_id, score_text) in _iter_rows(path, 3):
        try:
            score = float(score_text)
        except ValueError:
            raise TrecFormatError(
                f"score is not a number: {score_text!r}", path=str(path), line_number=line_number
            )
        if not math.isfinite(score):
            raise TrecFormatError(
                f"score is not finite: {score_text}", path=str(path), line_number=line_number
            )
        scores[(query_id, doc_id)] = score
    return scores


def read_topics(path: PathLike) -> Dict[str, str]:
    """Parse "query_id<TAB>query_text" rows"""
    path = str(path)
    topics: Dict[str, str] = {}
    try:
        handle = open(path, "r", encoding="utf-8")
    except OSError as e:
        raise TrecFormatError(f"cannot open file: {e}", path=path)
    with handle:
        for line_number, raw in enumerate(handle, start=1):
            line = raw.rstrip("\r\n")
            if not line.strip():
                continue
            query_id, sep, text = line.partition("\t")
            if not sep or not query_id.strip() or not text.strip():
                raise TrecFormatError(
                    "expected query_id<TAB>query_text", path=path, line_number=line_number
                )
            topics[query_id.strip()] = text.strip()
    return topics


def group_run(run: Iterable[RunEntry]) -> "OrderedDict[str, List[RunEntry]]":
    grouped: "OrderedDict[str, List[RunEntry]]" = OrderedDict()
    for entry in run:
        grouped.setdefault(entry.query_id, []).append(entry)
    for entries in grouped.values():
        entries.sort(key=lambda e: e.rank)
    return grouped


def group_judgments(judgments: Iterable[Judgment]) -> Dict[str, Dict[str, int]]:
    grouped: Dict[str, Dict[str, int]] = {}
    for j in judgments:
        grouped.setdefault(j.query_id, {})[j.doc_id] = j.grade
    return grouped


def rerank(
    baseline: Iterable[RunEntry],
    scores: Mapping[Tuple[str, str], float],
    depth: int = DEFAULT_RERANK_DEPTH,
    tag: Optional[str] = None,
) -> List[RunEntry]:
    """
    Reorder the head of each baseline ranking by external scores

    The top depth documents are sorted by (new score desc, original rank
    asc); documents without a new score fall to the bottom of the head.
    Documents below depth keep their order. A query without any new score
    is returned unchanged. Documents lacking a new score get scores just
    below the lowest new one, so scores keep falling with rank.

    Args:
        baseline: Baseline run entries
        scores: New score per (query_id, doc_id)
        depth: Number of head documents to reorder
        tag: Run tag of the output, baseline tags by default
    """
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")

    output = []
    for query_id, entries in group_run(baseline).items():
        head, tail = entries[:depth], entries[depth:]
        scored = [e for e in head if (query_id, e.doc_id) in scores]
        if not scored:
            output.extend(
                RunEntry(e.query_id, e.doc_id, e.rank, e.score, tag or e.tag) for e in entries
            )
            continue

        scored.sort(key=lambda e: (-scores[(query_id, e.doc_id)], e.rank))
        unscored = [e for e in head if (query_id, e.doc_id) not in scores]
        floor = scores[(query_id, scored[-1].doc_id)]

        ordered = [(e, scores[(query_id, e.doc_id)]) for e in scored]
        ordered += [(e, floor - offset) for offset, e in enumerate(unscored + tail, start=1)]
        output.extend(
            RunEntry(query_id, e.doc_id, rank, score, tag or e.tag)
            for rank, (e, score) in enumerate(ordered, start=1)
        )
    return output


def _gain(grade: int) -> float:
    return 2.0 ** max(grade, 0) - 1.0


def _evaluated_queries(
    run: Iterable[RunEntry], judgments: Iterable[Judgment]
) -> Tuple[Dict[str, List[str]], Dict[str, Dict[str, int]]]:
    ranked = {query_id: [e.doc_id for e in entries] for query_id, entries in group_run(run).items()}
    qrels = group_judgments(judgments)
    return ranked, qrels


def ndcg_at_k(
    run: Iterable[RunEntry], judgments: Iterable[Judgment], k: int = DEFAULT_CUTOFF
) -> MetricResult:
    """
    nDCG@k with exponential gains 2^g - 1 and log2(rank + 1) discounts

    Negative grades count as 0, unjudged documents too. A query whose ideal
    DCG is 0 scores 0. Every judged query is evaluated, judged queries
    missing from the run score 0.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    ranked, qrels = _evaluated_queries(run, judgments)

    per_query = {}
    for query_id, grades in qrels.items():
        docs = ranked.get(query_id, [])[:k]
        dcg = math.fsum(
            _gain(grades.get(doc_id, 0)) / math.log2(rank + 1)
            for rank, doc_id in enumerate(docs, start=1)
        )
        ideal = sorted(grades.values(), reverse=True)[:k]
        idcg = math.fsum(_gain(g) / math.log2(rank + 1) for rank, g in enumerate(ideal, start=1))
        per_query[query_id] = dcg / idcg if idcg > 0.0 else 0.0
    return MetricResult(name=f"ndcg@{k}", per_query=per_query)


def err_at_k(
    run: Iterable[RunEntry],
    judgments: Iterable[Judgment],
    k: int = DEFAULT_CUTOFF,
    g_max: int = DEFAULT_G_MAX,
) -> MetricResult:
    """
    Expected reciprocal rank at cutoff k

    The stop probability of a document with grade g is (2^g - 1) / 2^g_max,
    with g clamped to [0, g_max].
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if g_max < 1:
        raise ValueError(f"g_max must be >= 1, got {g_max}")
    ranked, qrels = _evaluated_queries(run, judgments)
    scale = 2.0 ** g_max

    per_query = {}
    for query_id, grades in qrels.items():
        err = 0.0
        not_stopped = 1.0
        for rank, doc_id in enumerate(ranked.get(query_id, [])[:k], start=1):
            grade = min(max(grades.get(doc_id, 0), 0), g_max)
            stop = (2.0 ** grade - 1.0) / scale
            err += not_stopped * stop / rank
            not_stopped *= 1.0 - stop
        per_query[query_id] = err
    return MetricResult(name=f"err@{k}", per_query=per_query)


def parse_metric(name: str) -> Tuple[str, int]:
    """Split "err@20" / "ndcg@20" into a metric family and a cutoff"""
    match = METRIC_PATTERN.match(name.strip().lower())
    if not match or int(match.group(2)) < 1:
        raise ValueError(f"Unknown metric {name!r}, expected err@K or ndcg@K")
    return match.group(1), int(match.group(2))


def evaluate(run: Iterable[RunEntry], judgments: Iterable[Judgment], metric: str) -> MetricResult:
    family, k = parse_metric(metric)
    if family == "err":
        return err_at_k(run, judgments, k=k)
    return ndcg_at_k(run, judgments, k=k)


def compare_runs(
    system: Iterable[RunEntry],
    baseline: Iterable[RunEntry],
    judgments: Iterable[Judgment],
    metric: str,
) -> RunComparison:
    """Mean improvement over a baseline run plus per-query wins, losses and ties"""
    judgments = list(judgments)
    ours = evaluate(system, judgments, metric)
    theirs = evaluate(baseline, judgments, metric)
    wins = losses = ties = 0
    for query_id, value in ours.per_query.items():
        other = theirs.per_query.get(query_id, 0.0)
        if math.isclose(value, other, rel_tol=0.0, abs_tol=1e-12):
            ties += 1
        elif value > other:
            wins += 1
        else:
            losses += 1
    return RunComparison(
        metric=ours.name,
        system_mean=ours.mean,
        baseline_mean=theirs.mean,
        wins=wins,
        losses=losses,
        ties=ties,
    )


def query_sort_key(query_id: str):
    """Numeric ids sort numerically, before any non-numeric id"""
    return (0, int(query_id), "") if query_id.isdigit() else (1, 0, query_id)


def format_metric_table(result: MetricResult) -> str:
    """query_id<TAB>value rows and a final mean row, 4 decimal places"""
    lines = [
        f"{query_id}\t{result.per_query[query_id]:.4f}"
        for query_id in sorted(result.per_query, key=query_sort_key)
    ]
    lines.append(f"mean\t{result.mean:.4f}")
    return "\n".join(lines) + "\n"


def format_comparison(comparison: RunComparison) -> str:
    improvement = comparison.improvement_pct
    lines = [
        f"baseline\t{comparison.baseline_mean:.4f}",
        f"improvement_pct\t{'n/a' if improvement is None else format(improvement, '.4f')}",
        f"wins\t{comparison.wins}",
        f"losses\t{comparison.losses}",
        f"ties\t{comparison.ties}",
    ]
    return "\n".join(lines) + "\n"

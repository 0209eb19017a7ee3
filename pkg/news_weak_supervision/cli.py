"""Command-line interface for the weak supervision pipeline"""

import argparse
import sys
from pathlib import Path
from typing import Optional

from . import __version__
from .bm25 import BM25Index
from .config import Config, load_filter_config
from .corpus import Corpus, ingest_corpus, write_corpus
from .exceptions import WeakSupervisionError
from .interaction import load_embeddings
from .interaction_filter import (
    build_candidate_vectors,
    load_templates,
    read_selected,
    select_candidates,
    templates_from_judgments,
    write_selected,
    write_templates,
)
from .logger import setup_logger
from .pipeline import WeakSupervisionPipeline
from .ranking_filter import apply_ranking_filter, read_pairs, write_pairs
from .synthetic import generate_bundle
from .trec_eval import (
    DEFAULT_RERANK_DEPTH,
    compare_runs,
    evaluate,
    format_comparison,
    format_metric_table,
    parse_qrels,
    parse_run,
    read_scores,
    read_topics,
    rerank,
    write_run,
)
from .triples import emit_triples, read_triples, sample_batches, write_batches, write_triples

PROG = 'news-weak-supervision'


def create_parser() -> argparse.ArgumentParser:
    """Create and configure argument parser"""
    parser = argparse.ArgumentParser(
        prog=PROG,
        description='Weak supervision training data from headline/content news corpora',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Write a synthetic corpus, embeddings, templates and config
  %(prog)s generate --out-dir demo --docs 200 --seed 0

  # Run every stage with one config file
  %(prog)s pipeline --config demo/pipeline.yaml

  # Ranking filter only
  %(prog)s pipeline --config demo/pipeline.yaml --skip-interaction-filter

  # Evaluate a re-ranked run against qrels
  %(prog)s eval --run reranked.run --qrels qrels.txt --metric err@20
        """
    )
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    parser.add_argument(
        '-v', '--verbose', action='store_true', help='Enable debug logging'
    )

    sub = parser.add_subparsers(dest='command', metavar='COMMAND')
    sub.required = True

    p = sub.add_parser('ingest', help='Apply the headline length constraint to a corpus')
    p.add_argument('--corpus', required=True, help='Corpus TSV (doc_id, headline, content)')
    _add_config(p)
    p.add_argument('--out', required=True, help='Admitted corpus TSV')
    p.set_defaults(handler=cmd_ingest)

    index = sub.add_parser('index', help='BM25 index commands')
    index_sub = index.add_subparsers(dest='index_command', metavar='ACTION')
    index_sub.required = True
    p = index_sub.add_parser('build', help='Build a BM25 index over admitted contents')
    p.add_argument('--corpus', required=True, help='Corpus TSV')
    _add_config(p)
    p.add_argument('--out', required=True, help='Index file')
    p.set_defaults(handler=cmd_index_build)

    filt = sub.add_parser('filter', help='Ranking and interaction filters')
    filter_sub = filt.add_subparsers(dest='filter_command', metavar='FILTER')
    filter_sub.required = True

    p = filter_sub.add_parser('rank', help='Keep headlines retrieving their own article')
    p.add_argument('--corpus', required=True, help='Corpus TSV')
    p.add_argument('--index', required=True, help='Index file from "index build"')
    _add_config(p)
    _add_workers(p)
    p.add_argument('--out', required=True, help='pairs.tsv')
    p.set_defaults(handler=cmd_filter_rank)

    p = filter_sub.add_parser('interaction', help='Keep pairs near a template interaction')
    p.add_argument('--pairs', required=True, help='pairs.tsv from "filter rank"')
    p.add_argument('--corpus', required=True, help='Corpus TSV holding the paired articles')
    p.add_argument('--templates', required=True, help='Template TSV (id, query, document)')
    p.add_argument('--embeddings', required=True, help='Word vectors in text format')
    _add_config(p)
    _add_workers(p)
    p.add_argument('--out', required=True, help='selected.txt')
    p.set_defaults(handler=cmd_filter_interaction)

    p = sub.add_parser('emit', help='Write training triples')
    p.add_argument('--pairs', required=True, help='pairs.tsv')
    p.add_argument('--selected', help='selected.txt; omit to keep every pair')
    p.add_argument('--corpus', required=True, help='Corpus TSV')
    p.add_argument('--out', required=True, help='triples.tsv')
    p.set_defaults(handler=cmd_emit)

    p = sub.add_parser('sample', help='Sample training batches from triples')
    p.add_argument('--triples', required=True, help='triples.tsv')
    p.add_argument('--batch-size', type=int, default=Config.DEFAULT_BATCH_SIZE)
    p.add_argument('--iterations', type=int, default=Config.DEFAULT_ITERATIONS)
    p.add_argument('--seed', type=int, default=Config.DEFAULT_SEED)
    p.add_argument('--out', required=True, help='batches.tsv')
    p.set_defaults(handler=cmd_sample)

    p = sub.add_parser('templates', help='Build templates from judged query-document pairs')
    p.add_argument('--qrels', required=True, help='Qrels file; grades are ignored')
    p.add_argument('--topics', required=True, help='query_id<TAB>query_text file')
    p.add_argument('--docs', required=True, help='Document TSV (doc_id, title, body)')
    p.add_argument('--out', required=True, help='Template TSV')
    p.set_defaults(handler=cmd_templates)

    p = sub.add_parser('rerank', help='Re-rank a baseline run with external scores')
    p.add_argument('--run', required=True, help='Baseline TREC run')
    p.add_argument('--scores', required=True, help='query_id doc_id score file')
    p.add_argument('--depth', type=int, default=DEFAULT_RERANK_DEPTH)
    p.add_argument('--tag', help='Run tag of the output (default: baseline tag)')
    p.add_argument('--out', required=True, help='Re-ranked TREC run')
    p.set_defaults(handler=cmd_rerank)

    p = sub.add_parser('eval', help='Compute ERR@k or nDCG@k of a run')
    p.add_argument('--run', required=True, help='TREC run')
    p.add_argument('--qrels', required=True, help='TREC qrels')
    p.add_argument('--metric', default='err@20', help='err@K or ndcg@K (default: err@20)')
    p.add_argument('--baseline', help='Baseline run to compare against')
    p.add_argument('--out', help='Write the table here instead of stdout')
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser('generate', help='Write a synthetic corpus bundle')
    p.add_argument('--out-dir', required=True)
    p.add_argument('--docs', type=int, default=200)
    p.add_argument('--seed', type=int, default=0)
    p.set_defaults(handler=cmd_generate)

    p = sub.add_parser('pipeline', help='Run every stage from one config file')
    p.add_argument('-c', '--config', default=Config.DEFAULT_CONFIG_PATH,
                   help=f'Path to configuration file (default: {Config.DEFAULT_CONFIG_PATH})')
    _add_workers(p)
    p.add_argument('--seed', type=int, help='Batch sampling seed (default: from config)')
    p.add_argument('--skip-interaction-filter', action='store_true',
                   help='Emit triples for every ranking-filter survivor')
    p.set_defaults(handler=cmd_pipeline)

    return parser


def _add_config(parser: argparse.ArgumentParser):
    parser.add_argument('-c', '--config', help='Configuration file (default: built-in thresholds)')


def _add_workers(parser: argparse.ArgumentParser):
    parser.add_argument('--workers', type=int, metavar='N',
                        help='Worker threads (default: available parallelism)')


def cmd_ingest(args: argparse.Namespace) -> int:
    cfg = load_filter_config(args.config)
    result = ingest_corpus(args.corpus, cfg)
    write_corpus(args.out, result.admitted)
    print(f"admitted\t{len(result.admitted)}")
    print(f"rejected\t{result.rejected_count}")
    return 0


def cmd_index_build(args: argparse.Namespace) -> int:
    cfg = load_filter_config(args.config)
    result = ingest_corpus(args.corpus, cfg)
    index = BM25Index.build(result.admitted, result.stats, k1=cfg.k1, b=cfg.b)
    index.save(args.out)
    print(f"documents\t{index.doc_count}")
    print(f"terms\t{len(index)}")
    return 0


def cmd_filter_rank(args: argparse.Namespace) -> int:
    cfg = load_filter_config(args.config)
    result = ingest_corpus(args.corpus, cfg)
    index = BM25Index.load(args.index)
    pairs = apply_ranking_filter(result.admitted, index, cfg, workers=args.workers)
    write_pairs(args.out, pairs)
    print(f"retained\t{len(pairs)}")
    print(f"discarded\t{len(result.admitted) - len(pairs)}")
    return 0


def cmd_filter_interaction(args: argparse.Namespace) -> int:
    cfg = load_filter_config(args.config)
    pairs = read_pairs(args.pairs)
    corpus = Corpus.from_file(args.corpus)
    embeddings = load_embeddings(args.embeddings)
    templates = load_templates(args.templates)
    candidates = build_candidate_vectors(pairs, corpus, embeddings, cfg, workers=args.workers)
    selected = select_candidates(candidates, templates, embeddings, cfg, workers=args.workers)
    write_selected(args.out, selected)
    print(f"selected\t{len(selected)}")
    print(f"candidates\t{len(candidates)}")
    return 0


def cmd_emit(args: argparse.Namespace) -> int:
    pairs = read_pairs(args.pairs)
    selected = read_selected(args.selected) if args.selected else None
    triples = emit_triples(pairs, selected, Corpus.from_file(args.corpus))
    write_triples(args.out, triples)
    print(f"triples\t{len(triples)}")
    return 0


def cmd_sample(args: argparse.Namespace) -> int:
    triples = read_triples(args.triples)
    count = write_batches(
        args.out, sample_batches(triples, args.batch_size, args.iterations, args.seed)
    )
    print(f"batches\t{count}")
    return 0


def cmd_templates(args: argparse.Namespace) -> int:
    documents = {doc.doc_id: doc for doc in Corpus.from_file(args.docs)}
    rows = templates_from_judgments(parse_qrels(args.qrels), read_topics(args.topics), documents)
    write_templates(args.out, rows)
    print(f"templates\t{len(rows)}")
    return 0


def cmd_rerank(args: argparse.Namespace) -> int:
    entries = rerank(parse_run(args.run), read_scores(args.scores), depth=args.depth, tag=args.tag)
    write_run(args.out, entries)
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    run = parse_run(args.run)
    judgments = parse_qrels(args.qrels)
    table = format_metric_table(evaluate(run, judgments, args.metric))
    if args.baseline:
        table += format_comparison(
            compare_runs(run, parse_run(args.baseline), judgments, args.metric)
        )
    if args.out:
        Path(args.out).write_text(table, encoding="utf-8")
    else:
        sys.stdout.write(table)
    return 0


def cmd_generate(args: argparse.Namespace) -> int:
    paths = generate_bundle(args.out_dir, n_docs=args.docs, seed=args.seed)
    for name, path in paths.items():
        print(f"{name}\t{path}")
    return 0


def cmd_pipeline(args: argparse.Namespace) -> int:
    config = Config(args.config)
    logger = setup_logger(
        log_level="DEBUG" if args.verbose else config.log_level, log_file=config.log_file
    )
    pipeline = WeakSupervisionPipeline(
        config,
        logger=logger,
        workers=args.workers,
        seed=args.seed,
        skip_interaction_filter=args.skip_interaction_filter,
    )
    report = pipeline.run()

    print("=" * 60)
    print("Summary:")
    print("=" * 60)
    for line in report.summary_lines():
        print(line)
    print(f"Output directory: {config.output_dir}")
    return 0


def _positive(args: argparse.Namespace, *names: str) -> Optional[str]:
    for name in names:
        value = getattr(args, name, None)
        if value is not None and value < 1:
            return f"--{name.replace('_', '-')} must be >= 1"
    return None


def main(argv: Optional[list] = None) -> int:
    """
    Main entry point for CLI

    Args:
        argv: Optional command line arguments (for testing)

    Returns:
        Exit code (0 for success, 1 for failure)
    """
    parser = create_parser()
    args = parser.parse_args(argv)

    problem = _positive(args, 'workers', 'batch_size', 'iterations', 'depth', 'docs')
    if problem:
        print(f"Error: {problem}", file=sys.stderr)
        return 1

    if args.handler is not cmd_pipeline:
        setup_logger(log_level="DEBUG" if args.verbose else "INFO")

    try:
        return args.handler(args)
    except WeakSupervisionError as e:
        print(f"Error: {e}", file=sys.stderr)
        return 1
    except ValueError as e:
        print(f"Error: {e}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        print("\nInterrupted by user", file=sys.stderr)
        return 130
    except Exception as e:
        print(f"Fatal error: {e}", file=sys.stderr)
        return 1


if __name__ == '__main__':
    sys.exit(main())

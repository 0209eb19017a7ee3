"""
News Weak Supervision Package

Turns a headline/content news corpus into filtered pseudo-query training
triples for neural ranking models (ranking filter plus interaction
filter), and evaluates re-ranked runs with ERR@k and nDCG@k.
"""

__version__ = "1.0.0"

from .bm25 import BM25Index
from .config import Config, FilterConfig
from .exceptions import ConfigError, StageError, WeakSupervisionError
from .pipeline import WeakSupervisionPipeline, run_pipeline

__all__ = [
    "BM25Index",
    "Config",
    "FilterConfig",
    "ConfigError",
    "StageError",
    "WeakSupervisionError",
    "WeakSupervisionPipeline",
    "run_pipeline",
]

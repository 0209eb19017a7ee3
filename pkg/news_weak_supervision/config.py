"""Configuration management for the weak supervision pipeline"""

import os
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

import yaml

from .exceptions import ConfigError
from .logger import VALID_LEVELS


@dataclass(frozen=True)
class FilterConfig:
    """Thresholds shared by ingestion, indexing and both filters"""

    n_neg: int = 6
    n_rank: int = 30
    n_sim: int = 100
    min_headline_tokens: int = 6
    max_headline_tokens: int = 16
    k1: float = 1.2
    b: float = 0.75
    query_pad_length: int = 16

    COUNT_FIELDS = (
        "n_neg", "n_rank", "n_sim", "min_headline_tokens", "max_headline_tokens",
        "query_pad_length",
    )

    def validate(self) -> "FilterConfig":
        """
        Check the invariants between thresholds

        Returns:
            self, so calls can be chained

        Raises:
            ConfigError: If any invariant is violated
        """
        for name in self.COUNT_FIELDS:
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f"'{name}' must be an integer, got {value!r}")
            if value < 1:
                raise ConfigError(f"'{name}' must be >= 1, got {value}")
        for name in ("k1", "b"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"'{name}' must be a number, got {value!r}")

        if self.n_neg > self.n_rank:
            raise ConfigError(f"n_neg ({self.n_neg}) must not exceed n_rank ({self.n_rank})")
        if self.min_headline_tokens > self.max_headline_tokens:
            raise ConfigError(
                f"min_headline_tokens ({self.min_headline_tokens}) must not exceed "
                f"max_headline_tokens ({self.max_headline_tokens})"
            )
        if self.max_headline_tokens > self.query_pad_length:
            raise ConfigError(
                f"max_headline_tokens ({self.max_headline_tokens}) must not exceed "
                f"query_pad_length ({self.query_pad_length})"
            )
        if not 0.0 <= self.b <= 1.0:
            raise ConfigError(f"b must lie in [0, 1], got {self.b}")
        if self.k1 <= 0:
            raise ConfigError(f"k1 must be > 0, got {self.k1}")
        return self

    @property
    def retrieval_depth(self) -> int:
        """Depth deciding both the positive rank and the negatives in one call"""
        return max(self.n_rank, self.n_neg + 1)

    @classmethod
    def from_mapping(cls, data: Optional[Mapping[str, Any]]) -> "FilterConfig":
        """Build a validated FilterConfig, unknown keys are rejected"""
        data = dict(data or {})
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"Unknown filter option(s): {', '.join(unknown)}")
        return cls(**data).validate()

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


class Config:
    """Pipeline configuration loaded from a YAML file"""

    DEFAULT_LOG_LEVEL = "INFO"
    DEFAULT_CONFIG_PATH = "pipeline.yaml"
    DEFAULT_OUTPUT_DIR = "output"
    DEFAULT_RERANK_DEPTH = 100
    DEFAULT_SEED = 0
    DEFAULT_BATCH_SIZE = 1024
    DEFAULT_ITERATIONS = 50
    REQUIRED_FIELDS = ["corpus"]
    PATH_FIELDS = ["corpus", "embeddings", "templates", "output_dir"]
    KNOWN_FIELDS = PATH_FIELDS + [
        "filter", "rerank_depth", "workers", "seed", "batch_size", "iterations",
        "log_level", "log_file",
    ]

    def __init__(self, config_path: Optional[str] = None):
        """
        Initialize configuration from file

        Relative paths inside the file are resolved against the directory
        holding the file.

        Args:
            config_path: Path to YAML configuration file

        Raises:
            ConfigError: If configuration is invalid or missing
        """
        self.config_path = config_path or self.DEFAULT_CONFIG_PATH
        self._base_dir = Path(self.config_path).resolve().parent
        self._config = self._load_config()
        self._validate()
        self._filter = FilterConfig.from_mapping(self._config.get("filter"))

    def _load_config(self) -> Dict:
        """Load configuration from YAML file"""
        config_file = Path(self.config_path)

        if not config_file.exists():
            raise ConfigError(f"Config file not found: {self.config_path}")

        try:
            with open(config_file, 'r', encoding="utf-8") as f:
                config = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigError(f"Invalid YAML in config file: {e}")
        except OSError as e:
            raise ConfigError(f"Failed to read config file: {e}")

        if config is None:
            raise ConfigError("Config file is empty")
        if not isinstance(config, dict):
            raise ConfigError("Config file must contain a mapping of keys to values")
        return config

    def _validate(self):
        """Validate required configuration fields and scalar options"""
        for field in self.REQUIRED_FIELDS:
            if not self._config.get(field):
                raise ConfigError(f"Required field '{field}' missing in config")

        unknown = sorted(set(self._config) - set(self.KNOWN_FIELDS))
        if unknown:
            raise ConfigError(f"Unknown config field(s): {', '.join(unknown)}")

        filter_section = self._config.get("filter")
        if filter_section is not None and not isinstance(filter_section, dict):
            raise ConfigError("'filter' must be a mapping")

        for field in ("rerank_depth", "workers", "batch_size", "iterations"):
            value = self._config.get(field)
            if value is None:
                continue
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ConfigError(f"'{field}' must be a positive integer, got {value!r}")

        seed = self._config.get("seed")
        if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int) or seed < 0):
            raise ConfigError(f"'seed' must be a non-negative integer, got {seed!r}")

        log_level = str(self._config.get('log_level', self.DEFAULT_LOG_LEVEL))
        if log_level.upper() not in VALID_LEVELS:
            raise ConfigError(
                f"Invalid log_level '{log_level}'. Must be one of: {', '.join(VALID_LEVELS)}"
            )

    def _path(self, field: str) -> Optional[Path]:
        value = self._config.get(field)
        if not value:
            return None
        path = Path(str(value)).expanduser()
        return path if path.is_absolute() else self._base_dir / path

    def validate_paths(self, require_interaction: bool = True):
        """
        Check that every referenced input file exists

        Args:
            require_interaction: Also require embeddings and templates

        Raises:
            ConfigError: If an input path is missing
        """
        required = ["corpus"]
        if require_interaction:
            required += ["embeddings", "templates"]
        for field in required:
            path = self._path(field)
            if path is None:
                raise ConfigError(
                    f"Required field '{field}' missing in config "
                    "(needed by the interaction filter)"
                )
            if not path.is_file():
                raise ConfigError(f"Input file for '{field}' not found: {path}")

    @property
    def filter(self) -> FilterConfig:
        """Get the validated filter thresholds"""
        return self._filter

    @property
    def corpus_path(self) -> Path:
        return self._path("corpus")

    @property
    def embeddings_path(self) -> Optional[Path]:
        return self._path("embeddings")

    @property
    def templates_path(self) -> Optional[Path]:
        return self._path("templates")

    @property
    def output_dir(self) -> Path:
        return self._path("output_dir") or self._base_dir / self.DEFAULT_OUTPUT_DIR

    @property
    def rerank_depth(self) -> int:
        return self._config.get("rerank_depth", self.DEFAULT_RERANK_DEPTH)

    @property
    def workers(self) -> int:
        """Get worker count, defaulting to available parallelism"""
        return self._config.get("workers") or os.cpu_count() or 1

    @property
    def seed(self) -> int:
        return self._config.get("seed", self.DEFAULT_SEED)

    @property
    def batch_size(self) -> int:
        return self._config.get("batch_size", self.DEFAULT_BATCH_SIZE)

    @property
    def iterations(self) -> int:
        return self._config.get("iterations", self.DEFAULT_ITERATIONS)

    @property
    def log_file(self) -> Optional[str]:
        return self._config.get('log_file')

    @property
    def log_level(self) -> str:
        return str(self._config.get('log_level', self.DEFAULT_LOG_LEVEL)).upper()

    def to_dict(self) -> Dict:
        """Export the effective configuration as a dictionary"""
        return {
            'corpus': str(self.corpus_path),
            'embeddings': str(self.embeddings_path) if self.embeddings_path else None,
            'templates': str(self.templates_path) if self.templates_path else None,
            'output_dir': str(self.output_dir),
            'filter': self.filter.to_dict(),
            'rerank_depth': self.rerank_depth,
            'seed': self.seed,
            'batch_size': self.batch_size,
            'iterations': self.iterations,
            'log_file': self.log_file,
            'log_level': self.log_level,
        }


def load_filter_config(config_path: Optional[str] = None) -> FilterConfig:
    """Filter thresholds from a config file, or the defaults when none is given"""
    if config_path is None:
        return FilterConfig().validate()
    return Config(config_path).filter

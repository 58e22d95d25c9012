"""
Run configuration loaded from a flat key=value file
"""
import configparser
import logging
import os
from dataclasses import dataclass, fields, replace
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .exceptions import ConfigurationError

logger = logging.getLogger(__name__)

# Project root, one level above the tauberian_lab package
PROJECT_ROOT = Path(__file__).resolve().parent.parent.parent

CONFIG_ENV_VAR = 'TLAB_CONFIG'
DEFAULT_CONFIG_NAME = 'config.ini'

# configparser needs a section; the file format is flat
_SECTION = 'tlab'

OUTPUT_FORMATS = ('csv', 'json')


@dataclass(frozen=True)
class RunConfig:
    """Parameters shared by every suite"""
    limit: int = 100_000
    samples: int = 40
    min_x: float = 100.0
    max_x: float = 100_000.0
    delta: float = 1e-3
    tol_scale: float = 1.0
    format: str = 'csv'
    out: str = 'output'
    seed: int = 20240601
    label: str = 'PSI'
    table_cap: int = 50_000_000
    workers: int = 4
    gamma_terms: int = 1_000_000
    c_terms: int = 10_000_000

    def __post_init__(self):
        if self.limit < 1:
            raise ConfigurationError(f"limit must be >= 1, got {self.limit}")
        if self.min_x < 2:
            raise ConfigurationError(f"min_x must be >= 2, got {self.min_x}")
        if self.max_x < self.min_x:
            raise ConfigurationError(f"max_x ({self.max_x}) must be >= min_x ({self.min_x})")
        if self.samples < 1:
            raise ConfigurationError(f"samples must be >= 1, got {self.samples}")
        if self.delta <= 0:
            raise ConfigurationError(f"delta must be > 0, got {self.delta}")
        if self.tol_scale <= 0:
            raise ConfigurationError(f"tol_scale must be > 0, got {self.tol_scale}")
        if self.format not in OUTPUT_FORMATS:
            raise ConfigurationError(f"format must be one of {OUTPUT_FORMATS}, got {self.format!r}")
        if self.table_cap < self.limit:
            raise ConfigurationError(f"table_cap ({self.table_cap}) is below limit ({self.limit})")
        if self.workers < 1:
            raise ConfigurationError(f"workers must be >= 1, got {self.workers}")

    def sample_points(self, upper: Optional[float] = None) -> List[float]:
        """Log-spaced sample of `samples` points in [min_x, min(max_x, upper)]"""
        hi = self.max_x if upper is None else min(self.max_x, upper)
        lo = min(self.min_x, hi)
        if self.samples == 1 or hi == lo:
            return [float(hi)]
        points = np.geomspace(lo, hi, self.samples)
        # geomspace may return duplicates after rounding for tiny ranges
        return sorted(set(float(p) for p in points))

    def with_overrides(self, **overrides: Any) -> 'RunConfig':
        """Return a copy with every non-None override applied"""
        changes = {key: value for key, value in overrides.items() if value is not None}
        unknown = set(changes) - {f.name for f in fields(self)}
        if unknown:
            raise ConfigurationError(f"Unknown configuration keys: {sorted(unknown)}")
        return replace(self, **_coerce(changes))


def _field_types() -> Dict[str, type]:
    return {f.name: type(getattr(RunConfig(), f.name)) for f in fields(RunConfig)}


def _coerce(raw: Dict[str, Any]) -> Dict[str, Any]:
    """Convert string values read from the file into the dataclass field types"""
    types = _field_types()
    coerced = {}
    for key, value in raw.items():
        target = types.get(key)
        if target is None:
            raise ConfigurationError(f"Unknown configuration key: {key}")
        try:
            if target is int and isinstance(value, str):
                # accept 1e6 style integers
                coerced[key] = int(float(value))
            else:
                coerced[key] = target(value)
        except (TypeError, ValueError) as e:
            raise ConfigurationError(f"Invalid value for {key}: {value!r} ({e})") from e
    return coerced


def resolve_config_path(path: Optional[str] = None) -> Path:
    """Explicit path, then $TLAB_CONFIG, then config.ini at the project root"""
    if path:
        return Path(path)
    env_path = os.environ.get(CONFIG_ENV_VAR)
    if env_path:
        return Path(env_path)
    return PROJECT_ROOT / DEFAULT_CONFIG_NAME


def read_config_file(config_path: Path) -> Dict[str, str]:
    """Parse a flat key=value file; raises on malformed content"""
    parser = configparser.ConfigParser(inline_comment_prefixes=('#', ';'))
    text = config_path.read_text(encoding='utf-8')
    parser.read_string(f"[{_SECTION}]\n{text}")
    return {key.replace('-', '_'): value for key, value in parser[_SECTION].items()}


def load_run_config(path: Optional[str] = None) -> RunConfig:
    """Load the run configuration, falling back to defaults when the file is unusable"""
    config_path = resolve_config_path(path)

    if not config_path.exists():
        logger.warning(f"Configuration file not found at {config_path}, using default config")
        return RunConfig()

    try:
        raw = read_config_file(config_path)
    except (OSError, configparser.Error) as e:
        logger.error(f"Failed to load configuration from {config_path}: {e}, using default config")
        return RunConfig()

    config = RunConfig(**_coerce(raw))
    logger.info(f"Run configuration loaded from {config_path}")
    return config


@lru_cache(maxsize=1)
def default_run_config() -> RunConfig:
    """Process-wide configuration used when callers pass no explicit caps"""
    return load_run_config()


def table_cap() -> int:
    return default_run_config().table_cap


def describe(config: RunConfig) -> Tuple[Tuple[str, Any], ...]:
    """Stable (key, value) listing for report headers"""
    return tuple((f.name, getattr(config, f.name)) for f in fields(config))

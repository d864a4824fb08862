"""
Shared Utilities - Common tools and helpers for all squads.

This module contains generic utilities used across the system:
- Logging configuration
- Environment configuration
- Deterministic random streams and numeric helpers
- The exception hierarchy
"""

import logging
import math
import os
from functools import lru_cache
from pathlib import Path
from typing import Optional, Sequence

import numpy as np


# ============================================================
# ENVIRONMENT CONFIGURATION
# ============================================================

@lru_cache()
def get_env_config() -> dict:
    """
    Load environment configuration.

    Returns:
        Dictionary with configuration values.
    """
    from dotenv import load_dotenv
    load_dotenv()

    return {
        "threads": int(os.getenv("ELECTROVAC_THREADS", "0") or 0),
        "log_level": os.getenv("ELECTROVAC_LOG_LEVEL", "INFO").upper(),
        "log_file": os.getenv("ELECTROVAC_LOG_FILE") or None,
        "debug_mode": os.getenv("ELECTROVAC_DEBUG", "false").lower() == "true",
    }


def resolve_threads(requested: Optional[int] = None) -> int:
    """
    Number of worker threads for point evaluation.

    Args:
        requested: Explicit override; falls back to ELECTROVAC_THREADS.

    Returns:
        A positive worker count (0 means one per CPU).
    """
    threads = get_env_config()["threads"] if requested is None else requested
    if threads <= 0:
        threads = os.cpu_count() or 1
    return max(1, threads)


# ============================================================
# LOGGING CONFIGURATION
# ============================================================

def setup_logger(
    name: str,
    level: int = logging.INFO,
    log_file: Optional[str] = None
) -> logging.Logger:
    """
    Set up a logger with consistent formatting.

    Args:
        name: Logger name (usually __name__).
        level: Logging level.
        log_file: Optional file path for logging.

    Returns:
        Configured logger instance.
    """
    logger = logging.getLogger(name)
    logger.setLevel(level)

    # Avoid duplicate handlers
    if logger.handlers:
        return logger

    formatter = logging.Formatter(
        '%(asctime)s | %(name)s | %(levelname)s | %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )

    # Console handler writes to stderr; stdout is reserved for JSON output
    console_handler = logging.StreamHandler()
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if log_file:
        file_handler = logging.FileHandler(log_file)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    return logger


def _level_from_env() -> int:
    level = logging.getLevelName(get_env_config()["log_level"])
    if get_env_config()["debug_mode"]:
        return logging.DEBUG
    return level if isinstance(level, int) else logging.INFO


# Default logger for the package
logger = setup_logger(
    "electrovac",
    level=_level_from_env(),
    log_file=get_env_config()["log_file"],
)


# ============================================================
# COMMON HELPERS
# ============================================================

def ensure_parent(path: str | Path) -> Path:
    """Create the parent directory of an output file and return the path."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    logger.debug(f"Ensured directory exists: {path.parent}")
    return path


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """
    Deterministic counter-based random stream.

    Args:
        seed: User-facing seed.
        stream: Independent sub-stream index (one per consumer).

    Returns:
        A numpy Generator driven by Philox keyed from (seed, stream).
    """
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, stream])))


def max_abs(*terms) -> float:
    """Largest magnitude over scalars and arrays (0.0 when empty)."""
    best = 0.0
    for term in terms:
        arr = np.abs(np.asarray(term, dtype=float))
        if arr.size:
            best = max(best, float(arr.max()))
    return best


def stable_mean(values: Sequence[float]) -> float:
    """Order-independent mean via exactly rounded summation."""
    if not values:
        return 0.0
    return math.fsum(values) / len(values)


# ============================================================
# ERROR HANDLING
# ============================================================

class ElectrovacError(Exception):
    """Base exception for all electrovac errors."""

    def to_dict(self) -> dict:
        return {"error": type(self).__name__, "message": str(self)}


class ConfigError(ElectrovacError):
    """Malformed or schema-violating run configuration."""
    pass


class InvalidParameterError(ElectrovacError):
    """Constructor arguments outside the admissible range."""
    pass


class DimensionMismatchError(ElectrovacError):
    """Point or field dimension disagrees with what was expected."""
    pass


class DomainViolationError(ElectrovacError):
    """Evaluation requested outside the domain of a system."""
    pass


class SingularPointError(DomainViolationError):
    """Point lies on the declared singular set of a field."""
    pass


class NonPositiveConformalFactorError(DomainViolationError):
    """Conformal factor is not strictly positive at the point."""
    pass


class NonFiniteResultError(ElectrovacError):
    """Overflow or NaN produced during evaluation."""
    pass


class CoincidentCentersError(InvalidParameterError):
    pass


class ZeroSlopeError(InvalidParameterError):
    pass


class DegenerateDiscriminantError(InvalidParameterError):
    pass


class NonPositiveLowerBoundError(ElectrovacError):
    """Lower lapse bound is not positive; uniform equivalence not certified."""
    pass


class EmptyLevelSetError(ElectrovacError):
    pass


class DegenerateGradientError(ElectrovacError):
    pass


class StationaryLapseError(ElectrovacError):
    pass


class NotSeparableError(ElectrovacError):
    pass


class QuadratureFailureError(ElectrovacError):
    pass


class SingularCoefficientError(ElectrovacError):
    pass


class ConstraintDriftError(ElectrovacError):
    pass


class InconsistentInitialDataError(ElectrovacError):
    pass


class StepFailureError(ElectrovacError):
    pass


class InterpolationBudgetError(ElectrovacError):
    """Trajectory grid too coarse for the Hermite interpolation budget."""
    pass


class OutOfProfileRangeError(DomainViolationError):
    pass


class EmptyRegionError(ElectrovacError):
    pass

"""
MagLat - Configuration
======================
Centralized defaults for numerics, tolerances, output and logging.
"""

from dataclasses import dataclass
from typing import Tuple
import logging
import os


# =============================================================================
# LOGGING CONFIGURATION
# =============================================================================

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
LOG_LEVEL = logging.INFO


def setup_logging(level: int = LOG_LEVEL) -> logging.Logger:
    """Configure and return the application logger."""
    logging.basicConfig(format=LOG_FORMAT, level=level)
    logger = logging.getLogger("MagLat")
    logger.setLevel(level)
    return logger


# =============================================================================
# NUMERICS DEFAULTS
# =============================================================================

@dataclass(frozen=True)
class NumericsSettings:
    """Default sizes for lattice windows, strips and momentum grids."""
    strip_half_width: int = 60          # M
    k_points: int = 401
    filter_fraction: float = 0.5        # W_f = filter_fraction * M
    window_half_width: int = 64         # L
    bz_grid: Tuple[int, int] = (60, 60)
    box_count: int = 6
    weight_threshold: float = 0.5
    butterfly_q_max: int = 12
    butterfly_k_grid: int = 8
    max_flux_denominator: int = 97


NUMERICS = NumericsSettings()


# =============================================================================
# TOLERANCES
# =============================================================================

@dataclass(frozen=True)
class ToleranceSettings:
    """Numerical acceptance thresholds."""
    hermiticity: float = 1e-12
    projection: float = 1e-10
    realspace_projection: float = 1e-8
    stabilization: float = 1e-9
    integer_residual: float = 0.1
    gap_margin: float = 1e-8
    branch_ambiguity: float = 1e-8
    rational_flux: float = 1e-12
    eigen_residual: float = 1e-10


TOLERANCES = ToleranceSettings()


# =============================================================================
# POWER-RIEFFEL DEFAULTS
# =============================================================================

@dataclass(frozen=True)
class PowerRieffelSettings:
    """Grid sizes for the circle realization of the projection."""
    circle_points: int = 600
    dual_grid: Tuple[int, int] = (12, 8)   # (alpha points, beta points per cell)


POWER_RIEFFEL = PowerRieffelSettings()


# =============================================================================
# OUTPUT SETTINGS
# =============================================================================

@dataclass(frozen=True)
class OutputSettings:
    """Result file configuration."""
    significant_digits: int = 17
    report_name: str = "report.json"
    default_directory: str = "maglat_out"
    tool_version: str = "1.0.0"


OUTPUT = OutputSettings()


# =============================================================================
# RUNTIME SETTINGS
# =============================================================================

@dataclass(frozen=True)
class RuntimeSettings:
    """Parallelism controls."""
    threads_env: str = "MAGLAT_THREADS"
    default_threads: int = 4


RUNTIME = RuntimeSettings()


def worker_count() -> int:
    """Number of worker threads, capped by the MAGLAT_THREADS variable."""
    raw = os.environ.get(RUNTIME.threads_env, "")
    try:
        value = int(raw)
    except ValueError:
        return RUNTIME.default_threads
    return max(1, value)

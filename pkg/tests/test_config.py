"""
Tests for configuration module.
"""

import pytest

import sys
import os
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from config import (
    NUMERICS,
    TOLERANCES,
    POWER_RIEFFEL,
    OUTPUT,
    RUNTIME,
    setup_logging,
    worker_count,
)


class TestNumericsSettings:
    """Tests for numerics defaults."""

    def test_strip_defaults(self):
        """Strip defaults should match the desk-scale duality runs."""
        assert NUMERICS.strip_half_width == 60
        assert NUMERICS.k_points == 401
        assert NUMERICS.filter_fraction * NUMERICS.strip_half_width == 30

    def test_grids_positive(self):
        """Grids and windows should be positive."""
        assert NUMERICS.window_half_width == 64
        assert NUMERICS.bz_grid == (60, 60)
        assert NUMERICS.box_count > 1

    def test_weight_threshold_range(self):
        """Interface weight threshold should be in (0, 1)."""
        assert 0 < NUMERICS.weight_threshold < 1


class TestToleranceSettings:
    """Tests for numerical tolerances."""

    def test_tolerances_ordered(self):
        """Exact identities should be held tighter than convergence checks."""
        assert TOLERANCES.hermiticity <= TOLERANCES.projection
        assert TOLERANCES.projection <= TOLERANCES.realspace_projection
        assert TOLERANCES.realspace_projection < TOLERANCES.integer_residual

    def test_integer_residual(self):
        """Integer acceptance should be 0.1."""
        assert TOLERANCES.integer_residual == 0.1


class TestPowerRieffelSettings:
    """Tests for Power-Rieffel defaults."""

    def test_circle_points_commensurate(self):
        """Default grid should fit theta = 1/3 and delta = 1/5."""
        assert POWER_RIEFFEL.circle_points % 15 == 0

    def test_dual_grid(self):
        """Dual grid should have at least 3 alpha points."""
        alpha, beta = POWER_RIEFFEL.dual_grid
        assert alpha >= 3
        assert beta >= 1


class TestOutputSettings:
    """Tests for output configuration."""

    def test_significant_digits(self):
        """Floats should round-trip with 17 significant digits."""
        assert OUTPUT.significant_digits == 17

    def test_report_name(self):
        """Report file should be JSON."""
        assert OUTPUT.report_name.endswith('.json')


class TestRuntime:
    """Tests for worker count resolution."""

    def test_default_workers(self, monkeypatch):
        """Unset variable should fall back to the default."""
        monkeypatch.delenv(RUNTIME.threads_env, raising=False)
        assert worker_count() == RUNTIME.default_threads

    def test_env_override(self, monkeypatch):
        """MAGLAT_THREADS should cap the worker count."""
        monkeypatch.setenv(RUNTIME.threads_env, "2")
        assert worker_count() == 2

    def test_invalid_env(self, monkeypatch):
        """Garbage values should fall back to the default."""
        monkeypatch.setenv(RUNTIME.threads_env, "many")
        assert worker_count() == RUNTIME.default_threads

    def test_minimum_one(self, monkeypatch):
        """Zero or negative values should still give one worker."""
        monkeypatch.setenv(RUNTIME.threads_env, "0")
        assert worker_count() == 1


class TestLogging:
    """Tests for logging setup."""

    def test_setup_returns_logger(self):
        """setup_logging should return a logger."""
        import logging
        logger = setup_logging()
        assert isinstance(logger, logging.Logger)

    def test_logger_has_correct_name(self):
        """Logger should have expected name."""
        logger = setup_logging()
        assert logger.name == "MagLat"


if __name__ == '__main__':
    pytest.main([__file__, '-v'])

"""Unit tests for Module F: Breakpoint Estimation."""

import numpy as np
import pytest

from src.module_f.breakpoint import MIN_POINTS, breakpoint_of, estimate_zeta_c, fit_breakpoint
from src.module_f.schema import CurvePoint, DriveCurve


def grid(stop: float, step: float) -> np.ndarray:
    return np.round(np.arange(0.0, stop + step / 2, step), 10)


class TestFitBreakpoint:
    """Test cases for the least-squares fit of min(u, c)."""

    def test_exact_curve(self):
        """Test fitting an exact min(u, c) curve."""
        u = grid(1.2, 0.1)
        c, sse = fit_breakpoint(u, np.minimum(u, 0.7))
        assert c == pytest.approx(0.7)
        assert sse == pytest.approx(0.0, abs=1e-20)

    def test_breakpoint_between_grid_points(self):
        """Test a breakpoint that falls between grid points."""
        u = grid(1.0, 0.1)
        c, _ = fit_breakpoint(u, np.minimum(u, 0.63))
        assert c == pytest.approx(0.63, abs=1e-9)

    def test_unsorted_input(self):
        """Test that grid order does not matter."""
        u = grid(1.0, 0.1)
        order = np.random.default_rng(0).permutation(u.size)
        c, _ = fit_breakpoint(u[order], np.minimum(u, 0.5)[order])
        assert c == pytest.approx(0.5)


class TestEstimate:
    """Test cases for breakpoint_of and estimate_zeta_c."""

    def test_noisy_curve(self):
        """Test the estimate on a noisy curve."""
        u = grid(1.5, 0.05)
        noise = np.random.default_rng(1).normal(0.0, 0.01, size=u.size)
        estimate = breakpoint_of(u, np.minimum(u, 0.7) + noise, n_bootstrap=100, seed=3)
        assert abs(estimate.c - 0.7) < 0.02
        assert 0.0 < estimate.stderr < 0.05
        assert not estimate.unbounded
        assert estimate.n_points == u.size

    def test_exact_curve_has_zero_error(self):
        """Test that an exact curve has zero bootstrap error."""
        u = grid(1.2, 0.1)
        estimate = breakpoint_of(u, np.minimum(u, 0.7), n_bootstrap=50)
        assert estimate.stderr == pytest.approx(0.0, abs=1e-12)
        assert estimate.plateau_points == 6

    def test_too_few_points(self):
        """Test that fewer than eight points are rejected."""
        u = grid(0.6, 0.1)
        assert u.size < MIN_POINTS
        with pytest.raises(ValueError):
            breakpoint_of(u, np.minimum(u, 0.3))

    def test_no_plateau_is_unbounded(self):
        """Test that a curve without a plateau is marked unbounded."""
        u = grid(0.9, 0.1)
        estimate = breakpoint_of(u, u, n_bootstrap=10)
        assert estimate.unbounded
        assert estimate.c == pytest.approx(0.9)

    def test_replica_bootstrap(self):
        """Test the bootstrap over replica values."""
        rng = np.random.default_rng(5)
        points = []
        for u in grid(1.4, 0.1):
            values = list(np.minimum(u, 0.8) + rng.normal(0.0, 0.02, size=6))
            points.append(CurvePoint(float(u), float(np.mean(values)), 0.0, values))
        estimate = estimate_zeta_c(DriveCurve(points, "replicas"), n_bootstrap=100, seed=2)
        assert abs(estimate.c - 0.8) < 0.03
        assert estimate.stderr > 0.0

    def test_capped_points_are_skipped(self):
        """Test that capped grid points are left out of the fit."""
        u = grid(1.2, 0.1)
        curve = DriveCurve.from_arrays(u, np.minimum(u, 0.7))
        curve.points.append(CurvePoint(1.3, float('nan'), float('nan')))
        estimate = estimate_zeta_c(curve, n_bootstrap=0)
        assert estimate.n_points == u.size
        assert estimate.c == pytest.approx(0.7)

    def test_length_mismatch(self):
        """Test that u and zeta must have equal length."""
        with pytest.raises(ValueError):
            DriveCurve.from_arrays([0.1, 0.2], [0.1])

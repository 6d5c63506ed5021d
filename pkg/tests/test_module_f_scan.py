"""Unit tests for Module F: Density Scan."""

import math

import pytest

from src.module_a.schema import Boundary, Domain
from src.module_d.schema import InitialFamily, InitialStateSpec
from src.module_f.scan import density_scan, doubled
from src.module_f.schema import mean_and_se

POISSON = InitialStateSpec(InitialFamily.POISSON, 0.0)


class TestDensityScan:
    """Test cases for density_scan."""

    def test_low_density_stabilizes(self, ring, nn1):
        """Test that low densities stabilize without hitting the cap."""
        result = density_scan(ring(32), 1.0, nn1, [0.05, 0.2], POISSON, replicas=3, seed=1)
        assert result.zetas == [0.05, 0.2]
        for point in result.points:
            assert point.cap_fraction == 0.0
            assert math.isfinite(point.mean_odometer)
            assert len(point.values) == 3
            assert 0.0 <= point.slept_fraction <= 1.0
            # Nothing leaves a torus.
            assert point.dissipated_fraction == 0.0
        assert len(result.records) == 6
        assert all(r['conservation'] for r in result.records)

    def test_odometer_grows_with_density(self, ring, nn1):
        """Test that the mean odometer grows with density."""
        result = density_scan(ring(64), 1.0, nn1, [0.05, 0.6], POISSON, replicas=4, seed=3,
                              cap=500_000)
        low, high = result.points
        assert low.mean_odometer < high.mean_odometer or high.cap_fraction > 0

    def test_above_one_always_hits_cap(self, ring, nn1):
        """Test that densities above one always hit the cap."""
        result = density_scan(ring(16), 1.0, nn1, [3.0], POISSON, replicas=3, seed=2, cap=2_000)
        point = result.point(3.0)
        assert point.cap_fraction == 1.0
        assert math.isnan(point.mean_odometer)
        assert point.values == []

    def test_compare_double(self, nn1):
        """Test the scan at L and 2L."""
        domain = Domain.cube(1, 16, Boundary.TORUS)
        result = density_scan(domain, 1.0, nn1, [0.3], POISSON, replicas=3, seed=5,
                              compare_double=True)
        point = result.points[0]
        assert point.double_mean_odometer is not None
        assert len(result.records) == 6
        assert {tuple(r['size']) for r in result.records} == {(16,), (32,)}
        if point.mean_odometer:
            assert point.divergence_ratio == pytest.approx(
                point.double_mean_odometer / point.mean_odometer)

    def test_low_density_odometer_independent_of_size(self, nn1):
        """Test that the mean odometer at zeta=0.05 does not change from L to 2L."""
        domain = Domain.cube(1, 128, Boundary.TORUS)
        result = density_scan(domain, 1.0, nn1, [0.05], POISSON, replicas=30, seed=12,
                              compare_double=True)
        assert result.points[0].cap_fraction == 0.0
        by_size = {}
        for record in result.records:
            by_size.setdefault(record['size'][0], []).append(record['mean_odometer'])
        mean_l, se_l = mean_and_se(by_size[128])
        mean_2l, se_2l = mean_and_se(by_size[256])
        assert abs(mean_2l - mean_l) <= 4 * math.hypot(se_l, se_2l)

    def test_doubled_domain(self):
        """Test doubling the sides of a domain."""
        domain = Domain.cube(2, 5, Boundary.TORUS)
        assert doubled(domain).shape == (10, 10)
        assert doubled(domain).is_torus

    def test_same_seed_same_result(self, ring, nn1):
        """Test that equal seeds give equal records."""
        a = density_scan(ring(16), 1.0, nn1, [0.4], POISSON, replicas=2, seed=9)
        b = density_scan(ring(16), 1.0, nn1, [0.4], POISSON, replicas=2, seed=9)
        assert a.records == b.records

    def test_requires_torus(self, segment, nn1):
        """Test that the scan requires a torus."""
        with pytest.raises(ValueError):
            density_scan(segment(16), 1.0, nn1, [0.2], POISSON, replicas=1, seed=0)

    def test_unknown_grid_point(self, ring, nn1):
        """Test that asking for a density off the grid raises."""
        result = density_scan(ring(8), 1.0, nn1, [0.2], POISSON, replicas=1, seed=0)
        with pytest.raises(KeyError):
            result.point(0.3)

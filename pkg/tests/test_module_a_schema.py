"""Unit tests for Module A: Domains and Configurations (schema.py)."""

import numpy as np
import pytest

from src.module_a.schema import (
    EXITED,
    EMPTY,
    SLEEPING,
    Boundary,
    Configuration,
    Domain,
    SiteState,
    config_le,
)


class TestDomain:
    """Test cases for Domain."""

    def test_cube(self):
        """Test creating a cubic domain."""
        domain = Domain.cube(2, 4)
        assert domain.shape == (4, 4)
        assert domain.n_sites == 16
        assert domain.is_torus

    def test_invalid_shape(self):
        """Test that invalid shapes are rejected."""
        with pytest.raises(ValueError):
            Domain(())
        with pytest.raises(ValueError):
            Domain((4, 0))

    def test_raster_order_last_axis_fastest(self):
        """Test that the last axis varies fastest in raster order."""
        domain = Domain.cube(2, 3)
        assert domain.index((0, 1)) == 1
        assert domain.index((1, 0)) == 3
        assert domain.coords(5) == (1, 2)

    def test_torus_wraps(self):
        """Test that jumps wrap around on a torus."""
        domain = Domain.cube(1, 5, Boundary.TORUS)
        assert domain.resolve_jump(4, (1,)) == 0
        assert domain.resolve_jump(0, (-1,)) == 4

    def test_absorbing_exits(self):
        """Test that jumps leave an absorbing box."""
        domain = Domain.cube(1, 5, Boundary.ABSORBING)
        assert domain.resolve_jump(4, (1,)) == EXITED
        assert domain.resolve_jump(0, (-1,)) == EXITED
        assert domain.resolve_jump(2, (1,)) == 3

    def test_resolve_jump_checks_arguments(self):
        """Test that resolve_jump rejects bad sites and offsets."""
        domain = Domain.cube(2, 3)
        with pytest.raises(ValueError):
            domain.resolve_jump(9, (1, 0))
        with pytest.raises(ValueError):
            domain.resolve_jump(0, (1,))

    @pytest.mark.parametrize("boundary", [Boundary.TORUS, Boundary.ABSORBING])
    def test_jump_table_matches_resolve_jump(self, boundary):
        """Test that the precomputed jump table matches resolve_jump."""
        domain = Domain((3, 4), boundary)
        offsets = [(1, 0), (-1, 0), (0, 1), (0, -2)]
        table = domain.jump_table(offsets)
        for k, offset in enumerate(offsets):
            for x in range(domain.n_sites):
                assert table[k, x] == domain.resolve_jump(x, offset)

    def test_describe(self):
        """Test the domain description."""
        assert Domain((4, 6), Boundary.ABSORBING).describe() == "d=2 L=4,6 boundary=absorbing"


class TestConfiguration:
    """Test cases for Configuration."""

    def test_from_states_and_back(self):
        """Test building a configuration from states and reading them back."""
        domain = Domain.cube(1, 4)
        states = [EMPTY, SLEEPING, SiteState.active(1), SiteState.active(3)]
        config = Configuration.from_states(domain, states)
        assert config.states() == states
        assert config.total_particles == 5
        assert config.total_active == 4

    def test_sleeping_site_holds_one_particle(self):
        """Test that a sleeping site must hold exactly one particle."""
        domain = Domain.cube(1, 2)
        with pytest.raises(ValueError):
            Configuration(domain, np.array([2, 0]), np.array([True, False]))

    def test_negative_counts_rejected(self):
        """Test that negative counts are rejected."""
        with pytest.raises(ValueError):
            Configuration.from_counts(Domain.cube(1, 2), [1, -1])

    def test_set_state_keeps_totals(self):
        """Test that setting a state keeps the cached totals right."""
        config = Configuration.from_counts(Domain.cube(1, 3), [2, 0, 1])
        config.set_state(0, SLEEPING)
        config.set_state(1, SiteState.active(4))
        assert config.total_particles == 6
        assert config.total_active == 5
        assert config.check_totals()

    def test_order_rank(self):
        """Test the rank of each state in the site order."""
        domain = Domain.cube(1, 4)
        config = Configuration.from_states(
            domain, [EMPTY, SLEEPING, SiteState.active(1), SiteState.active(2)])
        assert config.order_rank().tolist() == [0, 1, 2, 3]

    def test_unstable_sites(self):
        """Test listing active sites and stability inside V."""
        domain = Domain.cube(1, 4)
        config = Configuration.from_states(
            domain, [EMPTY, SLEEPING, SiteState.active(1), SiteState.active(2)])
        assert config.unstable_sites() == [2, 3]
        assert config.unstable_sites([0, 1, 2]) == [2]
        assert config.is_stable_in([0, 1])
        assert not config.is_active_configuration()

    def test_pointwise_order(self):
        """Test the pointwise order of configurations."""
        domain = Domain.cube(1, 3)
        low = Configuration.from_states(domain, [EMPTY, SLEEPING, SiteState.active(1)])
        high = Configuration.from_states(domain, [SLEEPING, SiteState.active(1), SiteState.active(1)])
        assert low <= high
        assert not high <= low
        assert config_le(low, low)

    def test_order_across_domains_rejected(self):
        """Test that configurations on different domains cannot be compared."""
        a = Configuration.empty(Domain.cube(1, 3))
        b = Configuration.empty(Domain.cube(1, 4))
        with pytest.raises(ValueError):
            config_le(a, b)

    def test_copy_is_independent(self):
        """Test that a copy does not share storage."""
        config = Configuration.from_counts(Domain.cube(1, 2), [1, 1])
        clone = config.copy()
        clone.set_state(0, EMPTY)
        assert config.state(0) == SiteState.active(1)
        assert clone != config

    def test_views_are_read_only(self):
        """Test that the exposed arrays are read-only."""
        config = Configuration.from_counts(Domain.cube(1, 2), [1, 1])
        with pytest.raises(ValueError):
            config.counts[0] = 5

    def test_density(self):
        """Test the particle density."""
        config = Configuration.from_counts(Domain.cube(1, 4), [1, 0, 2, 0])
        assert config.density() == pytest.approx(0.75)

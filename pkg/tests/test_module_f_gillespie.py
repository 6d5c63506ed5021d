"""Unit tests for Module F: Continuous-Time Evolution."""

import pytest

from src.module_a.kernels import nearest_neighbour
from src.module_a.schema import EMPTY, SLEEPING, Boundary, Configuration, Domain, SiteState
from src.module_b.instruction_field import InstructionField
from src.module_c.engine import stabilize
from src.module_d.generators import generate
from src.module_d.schema import InitialFamily, InitialStateSpec
from src.module_f.gillespie import (
    fixation_matches_stabilization,
    gillespie_run,
    site_rate,
    total_rate,
)
from src.module_f.schema import EventKind


class TestRates:
    """Clock rates of the continuous-time dynamics."""

    def test_single_site_rate(self, ring):
        """Test the rate of a single active site."""
        domain = ring(4)
        config = Configuration.from_states(domain, [SiteState.active(3), EMPTY, EMPTY, EMPTY])
        assert total_rate(config, 0.5) == pytest.approx(3 * 1.5)
        assert site_rate(config, 0, 0.5) == pytest.approx(4.5)
        assert site_rate(config, 1, 0.5) == 0.0

    def test_sleeping_particles_do_not_ring(self, ring):
        """Test that sleeping particles have no rate."""
        domain = ring(2)
        config = Configuration.from_states(domain, [SiteState.active(1), SLEEPING])
        assert total_rate(config, 1.0) == pytest.approx(2.0)


class TestGillespieRun:
    """Test cases for gillespie_run."""

    @pytest.mark.parametrize("lam", [0.1, 1.0, 10.0])
    def test_counts_equal_odometer(self, lam):
        """Test that transition counts equal the stabilizing odometer."""
        domain = Domain.cube(1, 12, Boundary.TORUS)
        kernel = nearest_neighbour(1)
        for seed in range(5):
            config = generate(InitialStateSpec(InitialFamily.POISSON, 0.4, seed=seed), domain)
            field = InstructionField(seed, lam, kernel, domain)
            trace = gillespie_run(config, field, seed=seed + 100)
            report = stabilize(config, None, field)
            assert not trace.truncated
            assert trace.counts == report.increment
            assert trace.config == report.config
            assert fixation_matches_stabilization(trace, report.increment) is True

    def test_absorbing_box(self):
        """Test that counts and exits match stabilization on an absorbing box."""
        domain = Domain.cube(2, 4, Boundary.ABSORBING)
        config = generate(InitialStateSpec(InitialFamily.POISSON, 1.0, seed=3), domain)
        field = InstructionField(3, 1.0, nearest_neighbour(2), domain)
        trace = gillespie_run(config, field, seed=8)
        report = stabilize(config, None, field)
        assert trace.counts == report.increment
        exits = sum(1 for e in trace.events if e.kind is EventKind.EXIT)
        assert exits == report.dissipated

    def test_events_are_time_ordered(self, ring, make_field):
        """Test that events come in time order."""
        domain = ring(8)
        config = Configuration.from_counts(domain, [2, 0, 1, 0, 0, 1, 0, 0])
        trace = gillespie_run(config, make_field(domain, seed=4), seed=1)
        times = [e.time for e in trace.events]
        assert times == sorted(times)
        assert len(trace.events) == trace.n_events == trace.counts.total()
        assert trace.time == times[-1]

    def test_horizon_truncates(self, ring, make_field):
        """Test that the time horizon stops the run."""
        domain = ring(4)
        config = Configuration.from_counts(domain, [2, 1, 0, 0])
        trace = gillespie_run(config, make_field(domain), horizon=0.0)
        assert trace.truncated
        assert trace.n_events == 0
        assert trace.config == config
        assert fixation_matches_stabilization(trace, trace.counts) is None

    def test_event_budget_truncates(self, ring, make_field):
        """Test that the event budget stops the run."""
        domain = ring(4)
        # More particles than sites never fixate on a torus.
        config = Configuration.from_counts(domain, [2, 2, 1, 0])
        trace = gillespie_run(config, make_field(domain), max_events=300, record_events=False)
        assert trace.truncated
        assert trace.n_events == 300
        assert trace.events == []
        assert trace.config.total_particles == 5

    def test_empty_configuration(self, ring, make_field):
        """Test that an empty configuration is already fixated."""
        domain = ring(4)
        trace = gillespie_run(Configuration.empty(domain), make_field(domain))
        assert not trace.truncated
        assert trace.n_events == 0
        assert trace.time == 0.0

    def test_domain_mismatch(self, ring, make_field):
        """Test that a field on another domain is rejected."""
        with pytest.raises(ValueError):
            gillespie_run(Configuration.empty(ring(4)), make_field(ring(5)))

    def test_record(self, ring, make_field):
        """Test the fields of a continuous-time record."""
        domain = ring(4)
        config = Configuration.from_counts(domain, [1, 0, 0, 0])
        record = gillespie_run(config, make_field(domain)).to_record(replica=0)
        assert record['replica'] == 0
        assert record['truncated'] is False
        assert record['particles'] == 1

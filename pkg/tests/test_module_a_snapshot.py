"""Unit tests for Module A: Snapshot Format (snapshot.py)."""

import pytest

from src.module_a.kernels import nearest_neighbour
from src.module_a.schema import EMPTY, SLEEPING, Boundary, Configuration, Domain, SiteState
from src.module_a.snapshot import dump_snapshot, load_snapshot, read_snapshot, write_snapshot
from src.module_b.instruction_field import InstructionField
from src.module_c.engine import stabilize
from src.module_d.generators import generate
from src.module_d.schema import InitialFamily, InitialStateSpec


class TestSnapshot:
    """Test cases for the snapshot text format."""

    def test_dump_format(self):
        """Test the snapshot text format."""
        domain = Domain.cube(1, 4, Boundary.ABSORBING)
        config = Configuration.from_states(domain, [EMPTY, SLEEPING, SiteState.active(2), EMPTY])
        text = dump_snapshot(config)
        assert text.splitlines() == ["arw d=1 L=4 boundary=absorbing", "0 s 2 0"]

    def test_file_round_trip(self, temp_dir):
        """Test writing a snapshot file and reading it back."""
        domain = Domain((2, 3))
        config = Configuration.from_states(domain, [SiteState.active(1), SLEEPING, EMPTY,
                                                    EMPTY, SiteState.active(7), SLEEPING])
        path = temp_dir / "snap.txt"
        write_snapshot(config, str(path))
        assert read_snapshot(str(path)) == config

    def test_long_rows_wrap(self):
        """Test that long rows are wrapped and read back whole."""
        config = Configuration.from_counts(Domain.cube(1, 70), [1] * 70)
        lines = dump_snapshot(config).splitlines()
        assert len(lines) == 4
        assert load_snapshot("\n".join(lines)) == config

    @pytest.mark.parametrize("text", [
        "",
        "xyz d=1 L=2 boundary=torus\n0 0\n",
        "arw d=2 L=2 boundary=torus\n0 0\n",
        "arw d=1 L=2 boundary=sphere\n0 0\n",
        "arw d=1 L=3 boundary=torus\n0 0\n",
        "arw d=1 L=2\n0 0\n",
    ])
    def test_malformed(self, text):
        """Test that malformed snapshots are rejected."""
        with pytest.raises(ValueError):
            load_snapshot(text)

    def test_reloaded_configuration_stabilizes_identically(self, temp_dir):
        """Test that a reloaded configuration stabilizes to the same result."""
        domain = Domain.cube(2, 6, Boundary.TORUS)
        config = generate(InitialStateSpec(InitialFamily.POISSON, 0.6, seed=12), domain)
        path = temp_dir / "generated.txt"
        write_snapshot(config, str(path))
        reloaded = read_snapshot(str(path))
        field = InstructionField(12, 1.0, nearest_neighbour(2), domain)
        a = stabilize(config, None, field, cap=100_000)
        b = stabilize(reloaded, None, field, cap=100_000)
        assert a.config == b.config
        assert a.odometer == b.odometer
        assert a.to_record() == b.to_record()

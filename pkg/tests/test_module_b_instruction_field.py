"""Unit tests for Module B: Instruction Field (instruction_field.py)."""

import numpy as np
import pytest
from scipy import stats

from src.module_a.kernels import nearest_neighbour
from src.module_a.schema import Boundary, Domain
from src.module_b.instruction_field import (
    InstructionCursor,
    InstructionField,
    instruction_at,
    shifted_field,
)
from src.module_b.schema import SLEEP_CODE, Instruction, InstructionKind


def three_sigma(p: float, n: int) -> float:
    return 3.0 * np.sqrt(p * (1.0 - p) / n)


class TestInstruction:
    """Test cases for Instruction."""

    def test_sleep_and_jump(self):
        """Test building sleep and jump instructions."""
        assert Instruction.sleep().is_sleep
        jump = Instruction.jump((1, -1))
        assert jump.kind is InstructionKind.JUMP
        assert jump.offset == (1, -1)
        assert repr(jump) == "Jump(+1, -1)"
        assert jump.to_dict() == {'kind': 'jump', 'offset': [1, -1]}


class TestInstructionField:
    """Test cases for InstructionField."""

    @pytest.fixture
    def field(self):
        domain = Domain.cube(1, 32, Boundary.TORUS)
        return InstructionField(1234, 1.0, nearest_neighbour(1), domain)

    def test_pure_queries(self, field):
        """Test that repeated queries return the same instruction."""
        first = [field.instruction_at(5, j) for j in range(1, 20)]
        second = [field.instruction_at(5, j) for j in range(1, 20)]
        assert first == second

    def test_random_access_matches_sequential(self, field):
        """Test that random access matches a sequential read."""
        sequential = field.codes(7, 1, 100)
        assert field.code_at(7, 63) == sequential[62]
        assert instruction_at(field, 7, 99) == field.decode(int(sequential[98]))

    def test_same_seed_same_stream(self, field):
        """Test that equal seeds give equal streams."""
        other = InstructionField(1234, 1.0, field.kernel, field.domain)
        assert np.array_equal(field.codes(3, 1, 50), other.codes(3, 1, 50))

    def test_different_seed_different_stream(self, field):
        """Test that different seeds give different streams."""
        other = InstructionField(4321, 1.0, field.kernel, field.domain)
        assert not np.array_equal(field.codes(3, 1, 50), other.codes(3, 1, 50))

    def test_index_starts_at_one(self, field):
        """Test that instruction indices start at one."""
        with pytest.raises(ValueError):
            field.instruction_at(0, 0)
        with pytest.raises(ValueError):
            field.instruction_at(99, 1)

    def test_invalid_parameters(self):
        """Test that invalid lambda or kernel dimension is rejected."""
        domain = Domain.cube(1, 4)
        with pytest.raises(ValueError):
            InstructionField(0, 0.0, nearest_neighbour(1), domain)
        with pytest.raises(ValueError):
            InstructionField(0, 1.0, nearest_neighbour(2), domain)
        with pytest.raises(ValueError):
            InstructionField(0, 1.0, nearest_neighbour(1), domain, shift=[0, -1, 0, 0])

    def test_shifted_field_skips_prefix(self, field):
        """Test that a shifted field reads past the used prefix."""
        h0 = np.zeros(field.domain.n_sites, dtype=np.int64)
        h0[4] = 5
        tilde = shifted_field(field, h0)
        assert np.array_equal(tilde.codes(4, 1, 30), field.codes(4, 6, 30))
        assert np.array_equal(tilde.codes(5, 1, 30), field.codes(5, 1, 30))

    def test_shifts_compose(self, field):
        """Test that shifting twice adds the shifts."""
        n = field.domain.n_sites
        twice = field.shifted(np.full(n, 2)).shifted(np.full(n, 3))
        assert np.array_equal(twice.codes(0, 1, 10), field.codes(0, 6, 10))

    def test_table_description(self, field):
        """Test the instruction table description."""
        table = field.table_description()
        assert table['labels'] == ['sleep', [1], [-1]]
        assert table['cumulative'] == pytest.approx([0.5, 0.75, 1.0])
        assert table['ordering'].startswith("sleep-first")

    def test_cursor_matches_field(self, field):
        """Test that the buffered cursor matches the field."""
        cursor = InstructionCursor(field, block=8)
        for j in (1, 2, 9, 3, 40, 41):
            assert cursor.code(2, j) == field.code_at(2, j)


class TestInstructionFrequencies:
    """Empirical instruction frequencies against binomial bounds."""

    N_DRAWS = 100_000

    def test_symmetric_nearest_neighbour(self):
        """Test instruction frequencies of the symmetric walk."""
        domain = Domain.cube(1, 1, Boundary.TORUS)
        field = InstructionField(99, 1.0, nearest_neighbour(1), domain)
        codes = field.codes(0, 1, self.N_DRAWS)
        for code, p in ((SLEEP_CODE, 0.5), (1, 0.25), (2, 0.25)):
            freq = np.mean(codes == code)
            assert abs(freq - p) < three_sigma(p, self.N_DRAWS)

    @pytest.mark.parametrize("lam", [0.1, 1.0, 10.0])
    def test_chi_square_two_dimensions(self, lam):
        """Test instruction frequencies pooled over sites against a chi-square fit."""
        domain = Domain.cube(2, 4, Boundary.TORUS)
        kernel = nearest_neighbour(2)
        field = InstructionField(17, lam, kernel, domain)
        codes = np.concatenate([field.codes(x, 1, 5_000) for x in range(domain.n_sites)])
        observed = np.bincount(codes, minlength=1 + len(kernel.entries))
        expected = np.asarray([lam] + kernel.probabilities) / (1.0 + lam) * codes.size
        _, p_value = stats.chisquare(observed, expected)
        assert p_value > 0.001

    def test_large_lambda_sleeps(self):
        """Test that a large lambda almost always sleeps."""
        lam = 1e6
        domain = Domain.cube(1, 1, Boundary.TORUS)
        field = InstructionField(5, lam, nearest_neighbour(1), domain)
        codes = field.codes(0, 1, self.N_DRAWS)
        p = lam / (1 + lam)
        assert abs(np.mean(codes == SLEEP_CODE) - p) <= three_sigma(p, self.N_DRAWS) + 1e-5

    def test_sleep_probability_property(self):
        """Test the sleep probability lambda / (1 + lambda)."""
        domain = Domain.cube(1, 4)
        field = InstructionField(0, 3.0, nearest_neighbour(1), domain)
        assert field.sleep_probability == pytest.approx(0.75)

"""Pytest configuration and shared fixtures."""

import os
import tempfile
from pathlib import Path
from typing import Callable, Generator

import pytest

from src.module_a.kernels import JumpKernel, nearest_neighbour
from src.module_a.schema import Boundary, Configuration, Domain
from src.module_b.instruction_field import InstructionField


@pytest.fixture
def temp_dir() -> Generator[Path, None, None]:
    """Create a temporary directory for testing."""
    with tempfile.TemporaryDirectory() as tmpdir:
        yield Path(tmpdir)


@pytest.fixture
def nn1() -> JumpKernel:
    """Symmetric nearest-neighbour kernel in d=1."""
    return nearest_neighbour(1)


@pytest.fixture
def nn2() -> JumpKernel:
    """Symmetric nearest-neighbour kernel in d=2."""
    return nearest_neighbour(2)


@pytest.fixture
def ring() -> Callable[[int], Domain]:
    """Factory for one-dimensional tori."""
    return lambda side: Domain.cube(1, side, Boundary.TORUS)


@pytest.fixture
def segment() -> Callable[[int], Domain]:
    """Factory for one-dimensional absorbing boxes."""
    return lambda side: Domain.cube(1, side, Boundary.ABSORBING)


@pytest.fixture
def make_field() -> Callable[..., InstructionField]:
    """Factory for hashed instruction fields with the nearest-neighbour kernel."""
    def factory(domain: Domain, seed: int = 0, lam: float = 1.0) -> InstructionField:
        return InstructionField(seed, lam, nearest_neighbour(domain.dimension), domain)
    return factory


@pytest.fixture
def configuration() -> Callable[..., Configuration]:
    """Factory for active configurations from a count list."""
    return lambda domain, counts: Configuration.from_counts(domain, counts)


@pytest.fixture(autouse=True)
def reset_env_vars():
    """Reset environment variables between tests."""
    original_env = os.environ.copy()
    yield
    os.environ.clear()
    os.environ.update(original_env)


@pytest.fixture
def sample_config_file(temp_dir) -> Path:
    """Write the sample scan configuration into the temp directory."""
    from tests.fixtures import SAMPLE_CONFIG_YAML
    path = temp_dir / "config.yaml"
    path.write_text(SAMPLE_CONFIG_YAML + f"output:\n  directory: {temp_dir / 'out'}\n")
    return path

"""
Schema definitions for Module A: Lattice Core

This module defines the site states of the activated random walk, the finite
domains they live on and configurations over those domains.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Any, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .site_state import (
    EMPTY,
    SLEEPING,
    NotAcceptableError,
    SiteState,
    SiteTag,
    particle_count,
)

logger = logging.getLogger(__name__)

# Jump target meaning "the particle left the box".
EXITED = -1


class Boundary(Enum):
    """Boundary semantics of a finite domain."""
    TORUS = "torus"
    ABSORBING = "absorbing"


@dataclass(frozen=True)
class Domain:
    """
    Finite box of Z^d with torus or absorbing boundary.

    Sites are addressed by their raster index (last axis fastest).

    Attributes:
        shape: Side lengths L_1..L_d
        boundary: TORUS (jumps wrap) or ABSORBING (jumps leaving the box exit)
    """
    shape: Tuple[int, ...]
    boundary: Boundary = Boundary.TORUS

    def __post_init__(self):
        object.__setattr__(self, 'shape', tuple(int(s) for s in self.shape))
        if not self.shape:
            raise ValueError("Domain needs at least one axis")
        if any(s < 1 for s in self.shape):
            raise ValueError(f"Side lengths must be positive, got {self.shape}")

    @classmethod
    def cube(cls, dimension: int, side: int, boundary: Boundary = Boundary.TORUS) -> 'Domain':
        """Box with equal side lengths."""
        return cls(tuple([side] * dimension), boundary)

    @property
    def dimension(self) -> int:
        return len(self.shape)

    @property
    def n_sites(self) -> int:
        return int(np.prod(self.shape))

    @property
    def is_torus(self) -> bool:
        return self.boundary is Boundary.TORUS

    def coords(self, site: int) -> Tuple[int, ...]:
        """Coordinates of a raster index."""
        return tuple(int(c) for c in np.unravel_index(site, self.shape))

    def index(self, coords: Sequence[int]) -> int:
        """Raster index of in-box coordinates."""
        return int(np.ravel_multi_index(tuple(coords), self.shape))

    def contains(self, coords: Sequence[int]) -> bool:
        return all(0 <= c < s for c, s in zip(coords, self.shape))

    def resolve_jump(self, site: int, offset: Sequence[int]) -> int:
        """
        Target of a jump from ``site`` by ``offset``.

        Args:
            site: Raster index inside the domain
            offset: Jump vector of length d

        Returns:
            Raster index of the target, or EXITED when an absorbing box is left
        """
        if not 0 <= site < self.n_sites:
            raise ValueError(f"Site {site} outside domain {self.shape}")
        if len(offset) != self.dimension:
            raise ValueError(f"Offset {tuple(offset)} has wrong dimension for {self.shape}")
        target = [c + o for c, o in zip(self.coords(site), offset)]
        if self.is_torus:
            return self.index([t % s for t, s in zip(target, self.shape)])
        if not self.contains(target):
            return EXITED
        return self.index(target)

    def jump_table(self, offsets: Sequence[Sequence[int]]) -> np.ndarray:
        """
        Vectorised resolve_jump for every site and every offset.

        Returns:
            Integer array of shape (len(offsets), n_sites) holding targets or EXITED
        """
        grid = np.indices(self.shape).reshape(self.dimension, -1)
        table = np.empty((len(offsets), self.n_sites), dtype=np.int64)
        shape = np.asarray(self.shape).reshape(-1, 1)
        for k, offset in enumerate(offsets):
            target = grid + np.asarray(offset, dtype=np.int64).reshape(-1, 1)
            if self.is_torus:
                table[k] = np.ravel_multi_index(tuple(target % shape), self.shape)
            else:
                inside = np.all((target >= 0) & (target < shape), axis=0)
                flat = np.full(self.n_sites, EXITED, dtype=np.int64)
                flat[inside] = np.ravel_multi_index(tuple(target[:, inside]), self.shape)
                table[k] = flat
        return table

    def describe(self) -> str:
        """Header fragment used in snapshots and records."""
        sides = ",".join(str(s) for s in self.shape)
        return f"d={self.dimension} L={sides} boundary={self.boundary.value}"

    def to_dict(self) -> Dict[str, Any]:
        return {
            'dimension': self.dimension,
            'shape': list(self.shape),
            'boundary': self.boundary.value,
        }


class Configuration:
    """
    Assignment of a SiteState to every site of a domain.

    Storage is a particle-count array plus a separate sleeping flag; the
    totals sum|eta(x)| and sum[[eta(x)]] are cached and kept in sync by
    :meth:`set_state`.
    """

    def __init__(self, domain: Domain, counts: Optional[np.ndarray] = None,
                 sleeping: Optional[np.ndarray] = None):
        """
        Initialize a configuration.

        Args:
            domain: Domain the configuration lives on
            counts: Particle count per site (default: all zero)
            sleeping: Sleeping flag per site (default: none sleeping)
        """
        self.domain = domain
        n = domain.n_sites
        self._counts = np.zeros(n, dtype=np.int64) if counts is None else \
            np.asarray(counts, dtype=np.int64).reshape(-1).copy()
        self._sleeping = np.zeros(n, dtype=bool) if sleeping is None else \
            np.asarray(sleeping, dtype=bool).reshape(-1).copy()

        if self._counts.shape != (n,) or self._sleeping.shape != (n,):
            raise ValueError(f"Arrays do not match domain with {n} sites")
        if np.any(self._counts < 0):
            raise ValueError("Particle counts must be non-negative")
        if np.any(self._sleeping & (self._counts != 1)):
            raise ValueError("A sleeping site holds exactly one particle")

        self._total = int(self._counts.sum())
        self._active_total = int(self._counts[~self._sleeping].sum())

    @classmethod
    def empty(cls, domain: Domain) -> 'Configuration':
        return cls(domain)

    @classmethod
    def from_counts(cls, domain: Domain, counts: Iterable[int]) -> 'Configuration':
        """Active configuration with the given particle counts."""
        return cls(domain, np.asarray(list(counts) if not isinstance(counts, np.ndarray) else counts))

    @classmethod
    def from_states(cls, domain: Domain, states: Sequence[SiteState]) -> 'Configuration':
        """Configuration from a raster-ordered list of site states."""
        if len(states) != domain.n_sites:
            raise ValueError(f"Expected {domain.n_sites} states, got {len(states)}")
        counts = np.array([particle_count(s) for s in states], dtype=np.int64)
        sleeping = np.array([s.is_sleeping for s in states], dtype=bool)
        return cls(domain, counts, sleeping)

    # --- site access -----------------------------------------------------

    def state(self, site: int) -> SiteState:
        """Site state at a raster index."""
        n = int(self._counts[site])
        if n == 0:
            return EMPTY
        if self._sleeping[site]:
            return SLEEPING
        return SiteState.active(n)

    def set_state(self, site: int, state: SiteState):
        """Overwrite a site, keeping cached totals consistent."""
        old_n = int(self._counts[site])
        old_active = 0 if self._sleeping[site] else old_n
        new_n = particle_count(state)
        new_active = state.n if state.is_active else 0
        self._counts[site] = new_n
        self._sleeping[site] = state.is_sleeping
        self._total += new_n - old_n
        self._active_total += new_active - old_active

    def is_active_at(self, site: int) -> bool:
        """True when the site holds at least one active particle."""
        return bool(self._counts[site] > 0 and not self._sleeping[site])

    def states(self) -> List[SiteState]:
        return [self.state(x) for x in range(self.domain.n_sites)]

    def __getitem__(self, site: int) -> SiteState:
        return self.state(site)

    def __len__(self) -> int:
        return self.domain.n_sites

    # --- aggregates ------------------------------------------------------

    @property
    def counts(self) -> np.ndarray:
        """Read-only view of particle counts."""
        view = self._counts.view()
        view.flags.writeable = False
        return view

    @property
    def sleeping(self) -> np.ndarray:
        """Read-only view of sleeping flags."""
        view = self._sleeping.view()
        view.flags.writeable = False
        return view

    @property
    def total_particles(self) -> int:
        """Cached sum over sites of |eta(x)|."""
        return self._total

    @property
    def total_active(self) -> int:
        """Cached sum over sites of [[eta(x)]]."""
        return self._active_total

    def active_counts(self) -> np.ndarray:
        """[[eta(x)]] per site."""
        return np.where(self._sleeping, 0, self._counts)

    def density(self) -> float:
        return self._total / self.domain.n_sites

    def check_totals(self) -> bool:
        """True when the cached totals equal freshly recomputed sums."""
        return (self._total == int(self._counts.sum())
                and self._active_total == int(self.active_counts().sum()))

    def order_rank(self) -> np.ndarray:
        """SiteState.rank per site, for vectorised comparisons in N_s."""
        return self._counts + ((self._counts > 0) & ~self._sleeping)

    def unstable_sites(self, sites: Optional[Iterable[int]] = None) -> List[int]:
        """Sites (optionally restricted to ``sites``) holding active particles."""
        active = (self._counts > 0) & ~self._sleeping
        if sites is None:
            return [int(x) for x in np.flatnonzero(active)]
        return [x for x in sites if active[x]]

    def is_stable_in(self, sites: Optional[Iterable[int]] = None) -> bool:
        return not self.unstable_sites(sites)

    def is_active_configuration(self) -> bool:
        """True when no site holds a sleeping particle."""
        return not bool(self._sleeping.any())

    # --- copies and comparisons -----------------------------------------

    def copy(self) -> 'Configuration':
        return Configuration(self.domain, self._counts, self._sleeping)

    def __le__(self, other: 'Configuration') -> bool:
        return config_le(self, other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Configuration):
            return NotImplemented
        return (self.domain == other.domain
                and np.array_equal(self._counts, other._counts)
                and np.array_equal(self._sleeping, other._sleeping))

    def __repr__(self) -> str:
        return (f"Configuration({self.domain.describe()}, "
                f"particles={self._total}, active={self._active_total})")

    def to_dict(self) -> Dict[str, Any]:
        return {
            'domain': self.domain.to_dict(),
            'tokens': [s.token() for s in self.states()],
        }


def config_le(lower: Configuration, upper: Configuration) -> bool:
    """Pointwise comparison in the N_s order."""
    if lower.domain != upper.domain:
        raise ValueError("Configurations live on different domains")
    return bool(np.all(lower.order_rank() <= upper.order_rank()))


__all__ = [
    "Boundary",
    "Configuration",
    "Domain",
    "EMPTY",
    "EXITED",
    "NotAcceptableError",
    "SLEEPING",
    "SiteState",
    "SiteTag",
    "config_le",
]

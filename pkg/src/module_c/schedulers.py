"""
Module C: Schedulers
Orders in which unstable sites of V are picked for legal topplings.

Every scheduler only ever returns sites that currently hold an active
particle, so any of them drives stabilize through a legal sequence; by the
Abelian property they all reach the same final configuration and odometer.
"""

import logging
from abc import ABC, abstractmethod
from collections import deque
from typing import Deque, Dict, List, Optional, Set

from src.module_a.schema import Configuration
from src.utils.streams import TAG_SCHEDULER, generator

logger = logging.getLogger(__name__)


class Scheduler(ABC):
    """Picks the next unstable site of V."""

    name = "abstract"

    def start(self, config: Configuration, sites: List[int]):
        """Reset for a new stabilization of ``config`` in ``sites``."""
        self.config = config
        self._in_v = [False] * config.domain.n_sites
        for x in sites:
            self._in_v[x] = True
        self._reset([x for x in sites if config.is_active_at(x)])

    def notify(self, site: int):
        """A site received a particle or was just toppled."""
        if self._in_v[site]:
            self._push(site)

    @abstractmethod
    def _reset(self, unstable: List[int]):
        pass

    @abstractmethod
    def _push(self, site: int):
        pass

    @abstractmethod
    def next_site(self) -> Optional[int]:
        """An active site of V, or None when V is stable."""


class FifoScheduler(Scheduler):
    """Queue of unstable sites; a toppled site that stays unstable goes to the back."""

    name = "fifo"

    def _reset(self, unstable: List[int]):
        self._queue: Deque[int] = deque(unstable)
        self._queued: Set[int] = set(unstable)

    def _push(self, site: int):
        if site not in self._queued and self.config.is_active_at(site):
            self._queue.append(site)
            self._queued.add(site)

    def next_site(self) -> Optional[int]:
        while self._queue:
            x = self._queue.popleft()
            self._queued.discard(x)
            if self.config.is_active_at(x):
                return x
        return None


class RasterSweepScheduler(Scheduler):
    """Repeated passes over V in raster order, toppling each unstable site once per pass."""

    name = "raster"

    def _reset(self, unstable: List[int]):
        self._pass: Deque[int] = deque()
        self._pending: Set[int] = set(unstable)

    def _push(self, site: int):
        self._pending.add(site)

    def next_site(self) -> Optional[int]:
        while True:
            while self._pass:
                x = self._pass.popleft()
                if self.config.is_active_at(x):
                    return x
            if not self._pending:
                return None
            self._pass = deque(sorted(self._pending))
            self._pending.clear()


class RandomScheduler(Scheduler):
    """Uniformly random choice among the unstable sites of V."""

    name = "random"

    def __init__(self, seed: int = 0):
        self.seed = seed
        self._rng = generator(seed, TAG_SCHEDULER)

    def _reset(self, unstable: List[int]):
        self._items: List[int] = list(unstable)
        self._position: Dict[int, int] = {x: i for i, x in enumerate(self._items)}

    def _push(self, site: int):
        if site not in self._position:
            self._position[site] = len(self._items)
            self._items.append(site)

    def _remove_at(self, i: int):
        last = self._items.pop()
        removed = self._items[i] if i < len(self._items) else last
        if i < len(self._items):
            self._items[i] = last
            self._position[last] = i
        del self._position[removed]

    def next_site(self) -> Optional[int]:
        while self._items:
            i = int(self._rng.integers(len(self._items)))
            x = self._items[i]
            if self.config.is_active_at(x):
                return x
            self._remove_at(i)
        return None


class WavefrontScheduler(Scheduler):
    """
    Generations of unstable sites.

    Each site of the current wave is toppled until it is stable; sites
    activated meanwhile form the next wave.
    """

    name = "wavefront"

    def _reset(self, unstable: List[int]):
        self._current: Deque[int] = deque(sorted(unstable))
        self._next: Set[int] = set()

    def _push(self, site: int):
        self._next.add(site)

    def next_site(self) -> Optional[int]:
        while True:
            while self._current:
                x = self._current[0]
                if self.config.is_active_at(x):
                    return x
                self._current.popleft()
            if not self._next:
                return None
            self._current = deque(sorted(self._next))
            self._next.clear()


SCHEDULERS = {
    FifoScheduler.name: FifoScheduler,
    RasterSweepScheduler.name: RasterSweepScheduler,
    RandomScheduler.name: RandomScheduler,
    WavefrontScheduler.name: WavefrontScheduler,
}


def make_scheduler(name: str, seed: int = 0) -> Scheduler:
    """
    Build a scheduler by name.

    Args:
        name: fifo, raster, random or wavefront
        seed: Seed of the random scheduler's private stream
    """
    try:
        cls = SCHEDULERS[name]
    except KeyError:
        raise ValueError(f"Unknown scheduler '{name}' (choose from {sorted(SCHEDULERS)})")
    if cls is RandomScheduler:
        return RandomScheduler(seed)
    return cls()

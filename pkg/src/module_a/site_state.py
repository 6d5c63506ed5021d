"""
Module A: Site States
Elements of N_s = {0, s, 1, 2, ...} and their arithmetic.

Arrivals and departures follow s+1 = 2, s-1 = 0; the sleep instruction maps
1 to s, leaves n >= 2 unchanged and keeps s.s = s.
"""

from dataclasses import dataclass
from enum import Enum
from functools import total_ordering


class NotAcceptableError(ValueError):
    """Raised when a particle is removed from, or a toppling hits, an empty site."""


class SiteTag(Enum):
    """Contents of a site."""
    EMPTY = "empty"
    SLEEPING = "sleeping"
    ACTIVE = "active"


@total_ordering
@dataclass(frozen=True)
class SiteState:
    """
    Element of N_s.

    Attributes:
        tag: EMPTY, SLEEPING or ACTIVE
        n: Number of active particles (only for ACTIVE, n >= 1)
    """
    tag: SiteTag
    n: int = 0

    def __post_init__(self):
        if self.tag is SiteTag.ACTIVE and self.n < 1:
            raise ValueError(f"Active site needs n >= 1, got {self.n}")
        if self.tag is not SiteTag.ACTIVE and self.n != 0:
            raise ValueError(f"{self.tag.value} site cannot carry n={self.n}")

    @classmethod
    def active(cls, n: int) -> 'SiteState':
        """Site holding ``n`` active particles."""
        return cls(SiteTag.ACTIVE, n)

    @property
    def rank(self) -> int:
        """Position in the order 0 < s < 1 < 2 < ..."""
        if self.tag is SiteTag.EMPTY:
            return 0
        if self.tag is SiteTag.SLEEPING:
            return 1
        return self.n + 1

    @property
    def is_empty(self) -> bool:
        return self.tag is SiteTag.EMPTY

    @property
    def is_sleeping(self) -> bool:
        return self.tag is SiteTag.SLEEPING

    @property
    def is_active(self) -> bool:
        return self.tag is SiteTag.ACTIVE

    def __lt__(self, other: 'SiteState') -> bool:
        if not isinstance(other, SiteState):
            return NotImplemented
        return self.rank < other.rank

    def token(self) -> str:
        """Snapshot token: ``0``, ``s`` or a positive integer."""
        if self.tag is SiteTag.EMPTY:
            return "0"
        if self.tag is SiteTag.SLEEPING:
            return "s"
        return str(self.n)

    @classmethod
    def from_token(cls, token: str) -> 'SiteState':
        """Inverse of :meth:`token`."""
        if token == "s":
            return SLEEPING
        try:
            n = int(token)
        except ValueError:
            raise ValueError(f"Invalid site token: {token!r}")
        if n < 0:
            raise ValueError(f"Invalid site token: {token!r}")
        return EMPTY if n == 0 else cls.active(n)

    def __repr__(self) -> str:
        if self.tag is SiteTag.ACTIVE:
            return f"Active({self.n})"
        return self.tag.value.capitalize()


EMPTY = SiteState(SiteTag.EMPTY)
SLEEPING = SiteState(SiteTag.SLEEPING)


def particle_count(state: SiteState) -> int:
    """|state|: Empty -> 0, Sleeping -> 1, Active(n) -> n."""
    if state.tag is SiteTag.ACTIVE:
        return state.n
    return 1 if state.tag is SiteTag.SLEEPING else 0


def active_count(state: SiteState) -> int:
    """[[state]]: Empty -> 0, Sleeping -> 0, Active(n) -> n."""
    return state.n if state.tag is SiteTag.ACTIVE else 0


def site_increment(state: SiteState) -> SiteState:
    """Arrival of one particle; a sleeping particle is woken up."""
    return SiteState.active(particle_count(state) + 1)


def site_decrement(state: SiteState) -> SiteState:
    """
    Departure of one particle.

    Raises:
        NotAcceptableError: the site is empty
    """
    if state.tag is SiteTag.EMPTY:
        raise NotAcceptableError("not acceptable: no particle to remove from an empty site")
    remaining = particle_count(state) - 1
    return EMPTY if remaining == 0 else SiteState.active(remaining)


def site_sleep(state: SiteState) -> SiteState:
    """
    Effect of a sleep instruction.

    Raises:
        NotAcceptableError: the site is empty
    """
    if state.tag is SiteTag.EMPTY:
        raise NotAcceptableError("not acceptable: sleep instruction on an empty site")
    if state.tag is SiteTag.ACTIVE and state.n == 1:
        return SLEEPING
    return state

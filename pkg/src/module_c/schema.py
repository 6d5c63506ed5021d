"""
Schema definitions for Module C: Toppling Engine

Odometers, toppling sequences, toppling effects and stabilization reports.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Any, Iterable, List, Optional, Sequence

import numpy as np

from src.module_a.schema import Configuration, Domain


class Termination(Enum):
    """How a stabilization ended."""
    STABLE = "stable"
    CAP_EXCEEDED = "cap_exceeded"


class EffectKind(Enum):
    """What a single toppling did."""
    JUMP = "jump"
    EXIT = "exit"
    SLEEP = "sleep"


class StepFlag(Enum):
    """Classification of one step of a toppling sequence."""
    LEGAL = "legal"
    ACCEPTABLE = "acceptable"
    INVALID = "invalid"


class VerdictStatus(Enum):
    """Outcome of a structural check."""
    PASS = "pass"
    FAIL = "fail"
    INVALID_INPUT = "invalid_input"
    NOT_APPLICABLE = "not_applicable"


class Odometer:
    """
    Per-site toppling counter h(x).

    Supports pointwise comparison (``<=``), addition and subtraction.
    """

    def __init__(self, counts: Iterable[int]):
        self._counts = np.asarray(list(counts) if not isinstance(counts, np.ndarray) else counts,
                                  dtype=np.int64).reshape(-1).copy()
        if np.any(self._counts < 0):
            raise ValueError("Odometer values must be non-negative")

    @classmethod
    def zeros(cls, domain: Domain) -> 'Odometer':
        return cls(np.zeros(domain.n_sites, dtype=np.int64))

    @property
    def counts(self) -> np.ndarray:
        view = self._counts.view()
        view.flags.writeable = False
        return view

    def increment(self, site: int):
        self._counts[site] += 1

    def __getitem__(self, site: int) -> int:
        return int(self._counts[site])

    def __len__(self) -> int:
        return len(self._counts)

    def copy(self) -> 'Odometer':
        return Odometer(self._counts)

    def total(self) -> int:
        return int(self._counts.sum())

    def max(self) -> int:
        return int(self._counts.max()) if len(self._counts) else 0

    def mean(self) -> float:
        return float(self._counts.mean()) if len(self._counts) else 0.0

    def restricted(self, sites: Iterable[int]) -> np.ndarray:
        return self._counts[np.fromiter(sites, dtype=np.int64)]

    def violations(self, upper: 'Odometer') -> int:
        """Number of sites where self(x) > upper(x)."""
        return int(np.count_nonzero(self._counts > upper._counts))

    def __le__(self, other: 'Odometer') -> bool:
        return bool(np.all(self._counts <= other._counts))

    def __add__(self, other: 'Odometer') -> 'Odometer':
        return Odometer(self._counts + other._counts)

    def __sub__(self, other: 'Odometer') -> 'Odometer':
        return Odometer(self._counts - other._counts)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Odometer):
            return NotImplemented
        return np.array_equal(self._counts, other._counts)

    def __repr__(self) -> str:
        return f"Odometer(total={self.total()}, max={self.max()})"

    def tolist(self) -> List[int]:
        return self._counts.tolist()


@dataclass
class ToppleSequence:
    """Ordered list of sites alpha = (x_1, ..., x_k)."""
    sites: List[int] = field(default_factory=list)

    def __post_init__(self):
        self.sites = [int(x) for x in self.sites]

    def validate(self, domain: Domain):
        for x in self.sites:
            if not 0 <= x < domain.n_sites:
                raise ValueError(f"Sequence entry {x} outside domain {domain.shape}")

    def multiplicity(self, n_sites: int) -> Odometer:
        """m_alpha: how many times each site appears."""
        return Odometer(np.bincount(np.asarray(self.sites, dtype=np.int64), minlength=n_sites)
                        if self.sites else np.zeros(n_sites, dtype=np.int64))

    def __len__(self) -> int:
        return len(self.sites)

    def __iter__(self):
        return iter(self.sites)


@dataclass(frozen=True)
class ToppleEffect:
    """
    Record of a single toppling.

    Attributes:
        site: Toppled site
        index: Instruction index used (h(x)+1 before the toppling)
        kind: JUMP, EXIT or SLEEP
        target: Receiving site for JUMP, None otherwise
        slept: True when a sleep instruction turned Active(1) into Sleeping
        legal: True when the site held an active particle
    """
    site: int
    index: int
    kind: EffectKind
    target: Optional[int] = None
    slept: bool = False
    legal: bool = True


@dataclass
class StabilizeReport:
    """
    Result of stabilizing a configuration in a set of sites V.

    Attributes:
        config: Final configuration
        odometer: Final odometer
        initial_odometer: Odometer at the start
        topplings: Topplings performed (equals sum of odometer increments)
        dissipated: Particles that left an absorbing box
        slept: Sleep instructions that put a particle to sleep
        termination: STABLE or CAP_EXCEEDED
        scheduler: Name of the scheduler used
        sent: Particles sent by each site to another site of the domain
        received: Particles received by each site
        sequence: Toppled sites in order (only when recorded)
    """
    config: Configuration
    odometer: Odometer
    initial_odometer: Odometer
    topplings: int
    dissipated: int
    slept: int
    termination: Termination
    scheduler: str
    sent: np.ndarray
    received: np.ndarray
    sequence: Optional[List[int]] = None

    @property
    def stable(self) -> bool:
        return self.termination is Termination.STABLE

    @property
    def increment(self) -> Odometer:
        """Odometer increment h_final - h_initial."""
        return self.odometer - self.initial_odometer

    def to_record(self, **context: Any) -> Dict[str, Any]:
        """
        NDJSON object for this report.

        Args:
            context: seed, domain, lambda, kernel id and other run fields
        """
        record = dict(context)
        record.update({
            'scheduler': self.scheduler,
            'topplings': self.topplings,
            'dissipated': self.dissipated,
            'slept': self.slept,
            'termination': self.termination.value,
            'particles': self.config.total_particles,
            'max_odometer': self.increment.max(),
        })
        return record


@dataclass
class SequenceResult:
    """
    Result of apply_sequence.

    Attributes:
        config: Configuration after the applied prefix
        odometer: Odometer after the applied prefix
        flags: Classification of every attempted step
        abort_index: Index of the first non-acceptable step, if any
        effects: Effects of the applied steps
    """
    config: Configuration
    odometer: Odometer
    flags: List[StepFlag]
    abort_index: Optional[int] = None
    effects: List[ToppleEffect] = field(default_factory=list)

    @property
    def legal(self) -> bool:
        return self.abort_index is None and all(f is StepFlag.LEGAL for f in self.flags)

    @property
    def acceptable(self) -> bool:
        return self.abort_index is None


@dataclass
class Verdict:
    """Outcome of a structural check with per-site violation count."""
    status: VerdictStatus
    violations: int = 0
    message: str = ""

    @property
    def passed(self) -> bool:
        return self.status is VerdictStatus.PASS

    def to_dict(self) -> Dict[str, Any]:
        return {
            'status': self.status.value,
            'violations': self.violations,
            'message': self.message,
        }


def sites_of(domain: Domain, sites: Optional[Sequence[int]]) -> List[int]:
    """Normalise an optional site set to a sorted list (None means the whole domain)."""
    if sites is None:
        return list(range(domain.n_sites))
    chosen = sorted(set(int(x) for x in sites))
    for x in chosen:
        if not 0 <= x < domain.n_sites:
            raise ValueError(f"Site {x} outside domain {domain.shape}")
    return chosen

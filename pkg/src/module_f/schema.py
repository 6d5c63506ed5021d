"""
Module F: Experiment Schema
Curves, scan results, continuous-time traces and comparison reports.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.module_a.schema import Configuration
from src.module_c.schema import Odometer


def mean_and_se(values: Sequence[float]) -> Tuple[float, float]:
    """Sample mean and standard error (0 for fewer than two values, nan when empty)."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        return float('nan'), float('nan')
    if arr.size == 1:
        return float(arr[0]), 0.0
    return float(arr.mean()), float(arr.std(ddof=1) / np.sqrt(arr.size))


@dataclass
class CurvePoint:
    """
    One grid point of a drive curve.

    Attributes:
        u: Added density
        mean: Replica mean of the retained density
        stderr: Standard error of the mean
        values: Retained density of every stable replica
        added: Mean realised added density
        capped: Replicas that hit the toppling cap
    """
    u: float
    mean: float
    stderr: float
    values: List[float] = field(default_factory=list)
    added: float = 0.0
    capped: int = 0

    def to_row(self) -> Dict[str, Any]:
        return {
            'u': self.u,
            'zeta': self.mean,
            'stderr': self.stderr,
            'added': self.added,
            'replicas': len(self.values),
            'capped': self.capped,
        }


@dataclass
class DriveCurve:
    """Retained density zeta(u) of the driven-dissipative system on a grid of u."""
    points: List[CurvePoint]
    label: str = "poisson"
    records: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def u(self) -> np.ndarray:
        return np.asarray([p.u for p in self.points], dtype=np.float64)

    @property
    def zeta(self) -> np.ndarray:
        return np.asarray([p.mean for p in self.points], dtype=np.float64)

    def rows(self) -> List[Dict[str, Any]]:
        return [p.to_row() for p in self.points]

    @classmethod
    def from_arrays(cls, u: Sequence[float], zeta: Sequence[float],
                    label: str = "synthetic") -> 'DriveCurve':
        """Curve without replica information (for fits of given data)."""
        if len(u) != len(zeta):
            raise ValueError("u and zeta must have the same length")
        return cls([CurvePoint(float(a), float(b), 0.0) for a, b in zip(u, zeta)], label)


@dataclass
class DrivePath:
    """
    Sample path of the one-by-one drive.

    Attributes:
        placements: Site of every added particle, in order
        retained: Particles in the box after each addition stabilized
        dissipated: Cumulative particles lost through the boundary
        config: Final configuration
        odometer: Total odometer
        capped: True when some stabilization hit its cap
    """
    placements: List[int]
    retained: List[int]
    dissipated: List[int]
    config: Configuration
    odometer: Odometer
    capped: bool = False

    @property
    def retained_density(self) -> float:
        return self.config.total_particles / self.config.domain.n_sites


@dataclass
class ScanPoint:
    """
    Replica statistics of one density on a torus.

    Attributes:
        zeta: Target density
        density: Mean measured initial density
        mean_odometer: Mean odometer per site (stable replicas)
        mean_odometer_se: Its standard error
        topplings: Mean topplings per stabilization
        dissipated_fraction: Mean dissipated particles per particle
        slept_fraction: Mean fraction of topplings that put a particle to sleep
        cap_fraction: Fraction of replicas that hit the cap
        values: Mean odometer per site of every stable replica
        double_mean_odometer: Mean odometer per site on the doubled torus
        divergence_ratio: double_mean_odometer / mean_odometer
    """
    zeta: float
    density: float
    mean_odometer: float
    mean_odometer_se: float
    topplings: float
    dissipated_fraction: float
    slept_fraction: float
    cap_fraction: float
    values: List[float] = field(default_factory=list)
    double_mean_odometer: Optional[float] = None
    divergence_ratio: Optional[float] = None

    def to_row(self) -> Dict[str, Any]:
        return {
            'zeta': self.zeta,
            'density': self.density,
            'mean_odometer': self.mean_odometer,
            'mean_odometer_se': self.mean_odometer_se,
            'topplings': self.topplings,
            'dissipated_fraction': self.dissipated_fraction,
            'slept_fraction': self.slept_fraction,
            'cap_fraction': self.cap_fraction,
            'double_mean_odometer': self.double_mean_odometer,
            'divergence_ratio': self.divergence_ratio,
        }


@dataclass
class ScanResult:
    """Density scan over a grid of zeta on a torus."""
    points: List[ScanPoint]
    label: str = "poisson"
    records: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def zetas(self) -> List[float]:
        return [p.zeta for p in self.points]

    def point(self, zeta: float) -> ScanPoint:
        for p in self.points:
            if abs(p.zeta - zeta) < 1e-12:
                return p
        raise KeyError(f"zeta {zeta} not on the scan grid")

    def rows(self) -> List[Dict[str, Any]]:
        return [p.to_row() for p in self.points]


class EventKind(Enum):
    """Transition applied by a continuous-time event."""
    JUMP = "jump"
    EXIT = "exit"
    SLEEP = "sleep"


@dataclass(frozen=True)
class GillespieEvent:
    time: float
    site: int
    kind: EventKind


@dataclass
class GillespieTrace:
    """
    Event-driven evolution.

    Attributes:
        events: (time, site, transition) log when recorded
        counts: Transitions per site
        config: Final configuration
        time: Time of the last applied event
        truncated: True when the horizon or event budget stopped the run
            before every site was stable
        n_events: Events applied
    """
    events: List[GillespieEvent]
    counts: Odometer
    config: Configuration
    time: float
    truncated: bool
    n_events: int

    @property
    def stable(self) -> bool:
        return not self.truncated

    def to_record(self, **context: Any) -> Dict[str, Any]:
        record = dict(context)
        record.update({
            'events': self.n_events,
            'time': self.time,
            'truncated': self.truncated,
            'particles': self.config.total_particles,
            'max_count': self.counts.max(),
        })
        return record


@dataclass
class BreakpointEstimate:
    """
    Fit of zeta(u) = min(u, c).

    Attributes:
        c: Breakpoint estimate
        stderr: Bootstrap standard error
        sse: Residual sum of squares at c
        n_points: Grid points used
        plateau_points: Grid points with u >= c
        unbounded: True when no plateau was detected
    """
    c: float
    stderr: float
    sse: float
    n_points: int
    plateau_points: int
    unbounded: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {
            'c': self.c,
            'stderr': self.stderr,
            'sse': self.sse,
            'n_points': self.n_points,
            'plateau_points': self.plateau_points,
            'unbounded': self.unbounded,
        }


@dataclass
class FamilyComparison:
    """Difference of a statistic between two families at one density."""
    zeta: float
    first: str
    second: str
    difference: float
    combined_se: float
    ci_low: float
    ci_high: float
    agree: bool
    both_capped: bool = False

    def to_row(self) -> Dict[str, Any]:
        return {
            'zeta': self.zeta,
            'first': self.first,
            'second': self.second,
            'difference': self.difference,
            'combined_se': self.combined_se,
            'ci_low': self.ci_low,
            'ci_high': self.ci_high,
            'agree': self.agree,
            'both_capped': self.both_capped,
        }


@dataclass
class BreakpointComparison:
    """
    Difference of two breakpoint estimates.

    Attributes:
        first, second: Family labels
        difference: c_first - c_second
        combined_se: Root sum of squares of the two bootstrap standard errors
        ci_low, ci_high: Normal interval from the bootstrap errors
        tolerance: Largest difference counted as agreement
        agree: |difference| <= tolerance
    """
    first: str
    second: str
    difference: float
    combined_se: float
    ci_low: float
    ci_high: float
    tolerance: float
    agree: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            'first': self.first,
            'second': self.second,
            'difference': self.difference,
            'combined_se': self.combined_se,
            'ci_low': self.ci_low,
            'ci_high': self.ci_high,
            'tolerance': self.tolerance,
            'agree': self.agree,
        }


@dataclass
class UniversalityReport:
    """Per-family scans and breakpoints with pairwise comparisons."""
    scans: Dict[str, ScanResult]
    comparisons: List[FamilyComparison]
    breakpoints: Dict[str, BreakpointEstimate] = field(default_factory=dict)
    breakpoint_differences: Dict[str, BreakpointComparison] = field(default_factory=dict)

    @property
    def all_agree(self) -> bool:
        return all(c.agree for c in self.comparisons)

    @property
    def breakpoints_agree(self) -> Optional[bool]:
        """None when no breakpoints were fitted."""
        if not self.breakpoint_differences:
            return None
        return all(c.agree for c in self.breakpoint_differences.values())

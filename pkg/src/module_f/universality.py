"""
Module F: Universality Comparison
Compare activity statistics and drive breakpoints across initial-state
families that share a density grid.
"""

import logging
from itertools import combinations
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from src.module_a.kernels import JumpKernel
from src.module_a.schema import Boundary, Domain
from src.module_d.schema import InitialStateSpec
from src.utils.streams import TAG_BOOTSTRAP, generator

from .breakpoint import estimate_zeta_c
from .drive import drive
from .scan import density_scan
from .schema import (
    BreakpointComparison,
    BreakpointEstimate,
    FamilyComparison,
    ScanPoint,
    UniversalityReport,
)

logger = logging.getLogger(__name__)

AGREEMENT_SIGMAS = 3.0
BREAKPOINT_TOLERANCE = 0.05


def _bootstrap_interval(a: Sequence[float], b: Sequence[float], n_bootstrap: int,
                        seed: int) -> Tuple[float, float]:
    if len(a) < 2 or len(b) < 2 or n_bootstrap < 2:
        return float('nan'), float('nan')
    rng = generator(seed, TAG_BOOTSTRAP)
    xa = np.sort(np.asarray(a, dtype=np.float64))
    xb = np.sort(np.asarray(b, dtype=np.float64))
    diffs = np.empty(n_bootstrap)
    for i in range(n_bootstrap):
        diffs[i] = (xa[rng.integers(xa.size, size=xa.size)].mean()
                    - xb[rng.integers(xb.size, size=xb.size)].mean())
    low, high = np.percentile(diffs, [2.5, 97.5])
    return float(low), float(high)


def compare_points(first: str, a: ScanPoint, second: str, b: ScanPoint,
                   n_bootstrap: int = 200, seed: int = 0) -> FamilyComparison:
    """
    Mean odometer per site of two families at one density.

    Agreement means the difference is within three combined standard errors,
    or both families hit the cap in every replica.
    """
    both_capped = a.cap_fraction == 1.0 and b.cap_fraction == 1.0
    if both_capped or not (a.values and b.values):
        return FamilyComparison(a.zeta, first, second, float('nan'), float('nan'),
                                float('nan'), float('nan'), both_capped, both_capped)
    difference = a.mean_odometer - b.mean_odometer
    combined = float(np.hypot(a.mean_odometer_se, b.mean_odometer_se))
    low, high = _bootstrap_interval(a.values, b.values, n_bootstrap, seed)
    agree = abs(difference) <= AGREEMENT_SIGMAS * combined
    return FamilyComparison(a.zeta, first, second, difference, combined, low, high, agree)


def compare_breakpoints(first: str, a: BreakpointEstimate, second: str, b: BreakpointEstimate,
                        tolerance: float = BREAKPOINT_TOLERANCE) -> BreakpointComparison:
    """
    Difference of two breakpoint estimates with a 95% interval from their
    bootstrap standard errors.

    Agreement means the difference is at most ``tolerance``.
    """
    difference = a.c - b.c
    combined = float(np.hypot(a.stderr, b.stderr))
    half_width = float(stats.norm.ppf(0.975)) * combined
    return BreakpointComparison(first, second, difference, combined,
                                difference - half_width, difference + half_width,
                                tolerance, bool(abs(difference) <= tolerance))


def universality_compare(families: Sequence[InitialStateSpec], zeta_grid: Sequence[float],
                         lam: float, kernel: JumpKernel, dimension: int, size: int,
                         replicas: int, seed: int,
                         u_grid: Optional[Sequence[float]] = None,
                         scheduler: str = "fifo",
                         cap: Optional[int] = None,
                         n_bootstrap: int = 200,
                         workers: int = 1) -> UniversalityReport:
    """
    Scan every family on a torus and compare them pairwise.

    Args:
        families: At least two family templates
        zeta_grid: Shared density grid
        lam: Sleep rate
        kernel: Jump kernel
        dimension: Lattice dimension
        size: Side length
        replicas: Replicas per density
        seed: Experiment seed
        u_grid: When given, also drive every family on an absorbing box and
            compare the breakpoint estimates
        scheduler: Scheduler name
        cap: Toppling cap per stabilization
        n_bootstrap: Bootstrap resamples
        workers: Worker processes

    Returns:
        UniversalityReport
    """
    if len(families) < 2:
        raise ValueError("universality_compare needs at least two families")
    labels = [f.family.value for f in families]
    if len(set(labels)) != len(labels):
        raise ValueError(f"Families must be distinct, got {labels}")

    torus = Domain.cube(dimension, size, Boundary.TORUS)
    scans = {f.family.value: density_scan(torus, lam, kernel, zeta_grid, f, replicas, seed,
                                          scheduler=scheduler, cap=cap, workers=workers)
             for f in families}

    comparisons: List[FamilyComparison] = []
    for first, second in combinations(labels, 2):
        for z in zeta_grid:
            comparisons.append(compare_points(first, scans[first].point(z),
                                              second, scans[second].point(z),
                                              n_bootstrap, seed))
    report = UniversalityReport(scans, comparisons)

    if u_grid is not None:
        box = Domain.cube(dimension, size, Boundary.ABSORBING)
        for f in families:
            curve = drive(box, lam, kernel, u_grid, replicas, seed, family=f.family,
                          params=f.params, scheduler=scheduler, cap=cap, workers=workers)
            report.breakpoints[f.family.value] = estimate_zeta_c(curve, n_bootstrap, seed)
        for first, second in combinations(labels, 2):
            report.breakpoint_differences[f"{first}-{second}"] = compare_breakpoints(
                first, report.breakpoints[first], second, report.breakpoints[second])

    disagreements = [c for c in comparisons if not c.agree]
    logger.info(f"Universality comparison of {labels}: "
                f"{len(comparisons) - len(disagreements)}/{len(comparisons)} points agree")
    if report.breakpoints_agree is False:
        logger.warning(f"Breakpoint estimates differ by more than {BREAKPOINT_TOLERANCE}")
    return report

"""
Module F: Breakpoint Estimation
Least-squares fit of the two-segment curve min(u, c) with bootstrap errors.
"""

import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from src.utils.streams import TAG_BOOTSTRAP, generator

from .schema import BreakpointEstimate, DriveCurve

logger = logging.getLogger(__name__)

MIN_POINTS = 8
MIN_PLATEAU_POINTS = 3
DEFAULT_BOOTSTRAP = 200


def fit_breakpoint(u: Sequence[float], y: Sequence[float]) -> Tuple[float, float]:
    """
    Exact minimiser of sum (y_i - min(u_i, c))^2 over c.

    Between consecutive sorted grid values the split into linear and plateau
    points is fixed, so the optimum on each interval is the plateau mean
    clipped to the interval.

    Returns:
        (c, sse)
    """
    order = np.argsort(np.asarray(u, dtype=np.float64), kind='stable')
    us = np.asarray(u, dtype=np.float64)[order]
    ys = np.asarray(y, dtype=np.float64)[order]
    n = us.size
    linear_sse = np.concatenate([[0.0], np.cumsum((ys - us) ** 2)])

    best_c, best_sse = us[-1], float(linear_sse[n])
    for j in range(n):
        # Points j..n-1 on the plateau, c in [u_{j-1}, u_j].
        low = us[j - 1] if j > 0 else -np.inf
        high = us[j]
        c = float(np.clip(ys[j:].mean(), low, high))
        sse = float(linear_sse[j] + np.sum((ys[j:] - c) ** 2))
        if sse < best_sse - 1e-15:
            best_c, best_sse = c, sse
    return float(best_c), best_sse


def estimate_zeta_c(curve: DriveCurve, n_bootstrap: int = DEFAULT_BOOTSTRAP,
                    seed: int = 0, min_points: int = MIN_POINTS) -> BreakpointEstimate:
    """
    Breakpoint of a drive curve.

    When the points carry replica values, the error comes from resampling
    replicas at every grid point; otherwise from resampling fit residuals.

    Args:
        curve: Drive curve
        n_bootstrap: Bootstrap resamples
        seed: Bootstrap seed
        min_points: Minimum number of grid points

    Returns:
        BreakpointEstimate; ``unbounded`` is set when fewer than three grid
        points lie at or beyond c

    Raises:
        ValueError: fewer than ``min_points`` finite grid points
    """
    points = [p for p in curve.points if np.isfinite(p.mean)]
    if len(points) < min_points:
        raise ValueError(f"Breakpoint fit needs at least {min_points} grid points, got {len(points)}")
    u = np.asarray([p.u for p in points], dtype=np.float64)
    y = np.asarray([p.mean for p in points], dtype=np.float64)
    c, sse = fit_breakpoint(u, y)

    plateau = int(np.count_nonzero(u >= c - 1e-12))
    unbounded = plateau < MIN_PLATEAU_POINTS
    if unbounded:
        logger.warning(f"No plateau detected: only {plateau} grid points at or beyond c={c:.4f}")

    stderr = _bootstrap_se(u, y, c, [p.values for p in points], n_bootstrap, seed)
    logger.info(f"Breakpoint estimate for {curve.label}: {c:.4f} +- {stderr:.4f}")
    return BreakpointEstimate(c, stderr, sse, len(points), plateau, unbounded)


def _bootstrap_se(u: np.ndarray, y: np.ndarray, c: float,
                  values: Sequence[Sequence[float]], n_bootstrap: int,
                  seed: int) -> float:
    if n_bootstrap < 2:
        return 0.0
    rng = generator(seed, TAG_BOOTSTRAP)
    with_replicas = all(len(v) > 1 for v in values)
    sorted_values = [np.sort(np.asarray(v, dtype=np.float64)) for v in values]
    fitted = np.minimum(u, c)
    residuals = y - fitted

    estimates = np.empty(n_bootstrap)
    for b in range(n_bootstrap):
        if with_replicas:
            sample = np.asarray([v[rng.integers(v.size, size=v.size)].mean() for v in sorted_values])
        else:
            sample = fitted + residuals[rng.integers(residuals.size, size=residuals.size)]
        estimates[b] = fit_breakpoint(u, sample)[0]
    return float(estimates.std(ddof=1))


def breakpoint_of(u: Sequence[float], y: Sequence[float],
                  n_bootstrap: int = DEFAULT_BOOTSTRAP, seed: int = 0,
                  label: Optional[str] = None) -> BreakpointEstimate:
    """estimate_zeta_c for plain arrays."""
    return estimate_zeta_c(DriveCurve.from_arrays(u, y, label or "synthetic"),
                           n_bootstrap=n_bootstrap, seed=seed)

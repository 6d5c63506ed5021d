"""
Module D: Initial State Generators
Active configurations with a prescribed density, drawn from per-site
counter-based streams in their own hash domains.
"""

import logging
from typing import Callable, Dict, List, Sequence

import numpy as np
from scipy import stats

from src.module_a.schema import Configuration, Domain
from src.utils.streams import TAG_INITIAL, TAG_TRANSLATE, generator, site_uniforms

from .schema import InitialFamily, InitialStateSpec

logger = logging.getLogger(__name__)

DEFAULT_BLOCK = 4
DEFAULT_FILL = 2


def poisson_counts(uniforms: np.ndarray, zeta: float) -> np.ndarray:
    """
    Poisson(zeta) occupancies by inversion of the given uniforms.

    For fixed uniforms the result is non-decreasing in zeta.
    """
    if zeta == 0:
        return np.zeros(uniforms.shape, dtype=np.int64)
    counts = stats.poisson.ppf(uniforms, zeta)
    return np.maximum(np.nan_to_num(counts, nan=0.0), 0).astype(np.int64)


def _poisson(spec: InitialStateSpec, domain: Domain) -> np.ndarray:
    u = site_uniforms(spec.seed, TAG_INITIAL, domain.shape)
    return poisson_counts(u, spec.zeta)


def _bernoulli(spec: InitialStateSpec, domain: Domain) -> np.ndarray:
    u = site_uniforms(spec.seed, TAG_INITIAL, domain.shape)
    return (u < spec.zeta).astype(np.int64)


def spread_pattern(total: int, period: int) -> List[int]:
    """``total`` particles spread as evenly as possible over ``period`` sites."""
    return [((i + 1) * total) // period - (i * total) // period for i in range(period)]


def default_period(domain: Domain) -> int:
    """Default tile period along the last axis: the side length itself."""
    return int(domain.shape[-1])


def _pattern_tile(spec: InitialStateSpec, domain: Domain) -> np.ndarray:
    dimension = domain.dimension
    if 'pattern' in spec.params:
        tile = np.asarray(spec.params['pattern'], dtype=np.int64)
    else:
        period = int(spec.params.get('period', default_period(domain)))
        if period < 1:
            raise ValueError(f"period must be positive, got {period}")
        tile = np.asarray(spread_pattern(int(round(spec.zeta * period)), period), dtype=np.int64)
    if tile.size == 0:
        raise ValueError("pattern must not be empty")
    if np.any(tile < 0):
        raise ValueError("pattern entries must be non-negative")
    if tile.ndim > dimension:
        raise ValueError(f"pattern has {tile.ndim} axes but the domain has {dimension}")
    return tile.reshape((1,) * (dimension - tile.ndim) + tile.shape)


def _periodic(spec: InitialStateSpec, domain: Domain) -> np.ndarray:
    tile = _pattern_tile(spec, domain)
    for side, period in zip(domain.shape, tile.shape):
        if side % period:
            raise ValueError(f"pattern period {tile.shape} does not divide side lengths {domain.shape}")

    # A spread tile of n sites is within 1/(2n) of zeta; explicit patterns carry their own density.
    tolerance = 0.5 / tile.size + 1e-12
    if abs(float(tile.mean()) - spec.zeta) > tolerance:
        logger.warning(f"Pattern density {tile.mean():g} differs from requested zeta {spec.zeta:g}")

    reps = tuple(side // period for side, period in zip(domain.shape, tile.shape))
    grid = np.tile(tile, reps)
    rng = generator(spec.seed, TAG_TRANSLATE, *domain.shape)
    shift = tuple(int(rng.integers(period)) for period in tile.shape)
    return np.roll(grid, shift, axis=tuple(range(domain.dimension))).reshape(-1)


def _block_renewal(spec: InitialStateSpec, domain: Domain) -> np.ndarray:
    m = int(spec.params.get('block', DEFAULT_BLOCK))
    fill = int(spec.params.get('fill', DEFAULT_FILL))
    if m < 1 or fill < 1:
        raise ValueError(f"block and fill must be positive, got block={m} fill={fill}")
    length = 2 * m
    last = domain.shape[-1]
    if last % length:
        raise ValueError(f"block length {length} does not divide last side length {last}")
    # A dense block holds fill particles on its first m sites, so it has density fill/2.
    q = 2.0 * spec.zeta / fill
    if q > 1:
        raise ValueError(f"block renewal with fill={fill} reaches at most zeta={fill / 2:g}, "
                         f"got {spec.zeta}")

    u = site_uniforms(spec.seed, TAG_INITIAL, domain.shape).reshape(-1, last)
    dense = u[:, ::length] < q
    block = np.concatenate([np.full(m, fill, dtype=np.int64), np.zeros(m, dtype=np.int64)])
    rows = (dense[:, :, None] * block[None, None, :]).reshape(u.shape[0], last)

    rng = generator(spec.seed, TAG_TRANSLATE, *domain.shape)
    phases = rng.integers(length, size=rows.shape[0])
    rows = np.stack([np.roll(row, int(p)) for row, p in zip(rows, phases)])
    return rows.reshape(-1)


_GENERATORS: Dict[InitialFamily, Callable[[InitialStateSpec, Domain], np.ndarray]] = {
    InitialFamily.POISSON: _poisson,
    InitialFamily.BERNOULLI: _bernoulli,
    InitialFamily.PERIODIC_PATTERN: _periodic,
    InitialFamily.BLOCK_RENEWAL: _block_renewal,
}


def generate(spec: InitialStateSpec, domain: Domain) -> Configuration:
    """
    Draw an active configuration from ``spec`` on ``domain``.

    Args:
        spec: Family, density, parameters and seed
        domain: Target domain (torus or absorbing box)

    Returns:
        Configuration without sleeping sites

    Raises:
        ValueError: Bernoulli with zeta > 1, or pattern/period mismatch
    """
    counts = _GENERATORS[spec.family](spec, domain)
    config = Configuration.from_counts(domain, counts)
    logger.debug(f"Generated {spec.family.value} zeta={spec.zeta:g} on {domain.describe()}: "
                 f"measured {config.density():.4f}")
    return config


def generate_nested(zetas: Sequence[float], domain: Domain, seed: int) -> List[Configuration]:
    """
    Poisson configurations for several densities from the same uniforms.

    Returns:
        One configuration per zeta; pointwise non-decreasing when zetas are
    """
    u = site_uniforms(seed, TAG_INITIAL, domain.shape)
    result = []
    for zeta in zetas:
        if not zeta >= 0:
            raise ValueError(f"zeta must be non-negative, got {zeta}")
        result.append(Configuration.from_counts(domain, poisson_counts(u, zeta)))
    return result


def measured_density(config: Configuration) -> float:
    """Sum of particle counts divided by the number of sites."""
    return config.total_particles / config.domain.n_sites

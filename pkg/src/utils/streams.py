"""
Counter-based random streams.

Every random quantity of a run is derived from a 64-bit seed, a hash-domain
tag and integer coordinates, so any value can be recomputed at random access
without replaying a sequential generator. The mixing function is the
SplitMix64 finalizer evaluated with numpy uint64 arithmetic.
"""

import hashlib
import logging
from typing import Iterable, Sequence

import numpy as np

logger = logging.getLogger(__name__)

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15

# Hash domains. Streams with different tags are independent.
TAG_INSTRUCTIONS = "instructions"
TAG_INITIAL = "initial-state"
TAG_TRANSLATE = "translate"
TAG_PLACEMENT = "placement"
TAG_SCHEDULER = "scheduler"
TAG_GILLESPIE = "gillespie"
TAG_BOOTSTRAP = "bootstrap"
TAG_REPLICA = "replica"
TAG_SELFTEST = "selftest"

_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_GAMMA = np.uint64(GOLDEN_GAMMA)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV_2_53 = 1.0 / float(1 << 53)


def tag_value(tag: str) -> int:
    """64-bit integer identifying a hash domain."""
    digest = hashlib.blake2b(tag.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def mix64(value: int) -> int:
    """SplitMix64 finalizer on a Python integer."""
    z = value & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def stream_key(seed: int, tag: str, *coords: int) -> int:
    """
    Fold a seed, a hash-domain tag and integer coordinates into one key.

    Args:
        seed: Experiment seed (any integer, reduced mod 2**64)
        tag: Hash-domain name
        coords: Further integers (geometry, replica, grid index, ...)

    Returns:
        64-bit key
    """
    key = mix64((seed & MASK64) ^ tag_value(tag))
    for c in coords:
        key = mix64((key + GOLDEN_GAMMA + (c & MASK64)) & MASK64)
    return key


def geometry_key(shape: Sequence[int]) -> int:
    """Key mixing the dimension and side lengths of a domain."""
    key = mix64(len(shape))
    for side in shape:
        key = mix64((key ^ (side & MASK64)) + GOLDEN_GAMMA)
    return key


def _mix_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def site_keys(base_key: int, n_sites: int) -> np.ndarray:
    """Per-site keys for raster indices 0..n_sites-1 under ``base_key``."""
    with np.errstate(over="ignore"):
        idx = np.arange(n_sites, dtype=np.uint64)
        return _mix_array(np.uint64(base_key) ^ _mix_array(idx * _GAMMA + _GAMMA))


def uniforms_at(keys: np.ndarray, counters: np.ndarray) -> np.ndarray:
    """
    Uniform variates in [0, 1) for (key, counter) pairs.

    ``keys`` and ``counters`` broadcast against each other; the result depends
    only on the pair values.
    """
    with np.errstate(over="ignore"):
        k, c = np.broadcast_arrays(
            np.atleast_1d(np.asarray(keys, dtype=np.uint64)),
            np.atleast_1d(np.asarray(counters, dtype=np.uint64)),
        )
        z = _mix_array(k + c * _GAMMA)
        return (z >> _S11).astype(np.float64) * _INV_2_53


def site_uniforms(seed: int, tag: str, shape: Sequence[int], counter: int = 0) -> np.ndarray:
    """One uniform per site of a domain with side lengths ``shape``."""
    n_sites = int(np.prod(shape))
    keys = site_keys(stream_key(seed, tag, geometry_key(shape)), n_sites)
    return uniforms_at(keys, np.full(n_sites, counter, dtype=np.uint64))


def generator(seed: int, tag: str, *coords: int) -> np.random.Generator:
    """
    Sequential generator for randomness that never needs random access.

    Uses the counter-based Philox bit generator keyed by a SeedSequence over
    ``(seed, tag, coords)``.
    """
    entropy: Iterable[int] = [seed & MASK64, tag_value(tag), *[c & MASK64 for c in coords]]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(list(entropy))))


def replica_seed(seed: int, replica: int) -> int:
    """Seed of replica ``replica`` of an experiment seeded with ``seed``."""
    return stream_key(seed, TAG_REPLICA, replica)

"""
Module D: Initial States
Generators of spatially ergodic active configurations with a prescribed
density: i.i.d. Poisson and Bernoulli fields, tiled patterns with a random
translate, and correlated block renewals.
"""

from .schema import InitialFamily, InitialStateSpec
from .generators import generate, generate_nested, measured_density, poisson_counts

__all__ = [
    'InitialFamily',
    'InitialStateSpec',
    'generate',
    'generate_nested',
    'measured_density',
    'poisson_counts',
]

"""
Module D: Initial State Schema
Families of spatially ergodic initial distributions and their parameters.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Union


class InitialFamily(Enum):
    """Supported initial-state families."""

    POISSON = "poisson"  # i.i.d. Poisson(zeta)
    BERNOULLI = "bernoulli"  # i.i.d. {0,1} with mean zeta
    PERIODIC_PATTERN = "periodic"  # tiled pattern, random translate
    BLOCK_RENEWAL = "block"  # i.i.d. dense/empty blocks, random phase

    @classmethod
    def parse(cls, value: Union[str, 'InitialFamily']) -> 'InitialFamily':
        if isinstance(value, cls):
            return value
        aliases = {
            'poisson': cls.POISSON,
            'bernoulli': cls.BERNOULLI,
            'periodic': cls.PERIODIC_PATTERN,
            'periodic_pattern': cls.PERIODIC_PATTERN,
            'periodicpattern': cls.PERIODIC_PATTERN,
            'block': cls.BLOCK_RENEWAL,
            'block_renewal': cls.BLOCK_RENEWAL,
            'blockrenewal': cls.BLOCK_RENEWAL,
        }
        key = str(value).strip().lower().replace('-', '_')
        if key not in aliases:
            raise ValueError(f"Unknown initial-state family '{value}' "
                             f"(choose from {sorted(f.value for f in cls)})")
        return aliases[key]


@dataclass(frozen=True)
class InitialStateSpec:
    """
    Recipe for a random active configuration.

    Attributes:
        family: Distribution family
        zeta: Target density (mean particles per site), >= 0
        params: Family parameters. PERIODIC_PATTERN: ``pattern`` (nested list
            of counts) or ``period`` (default: the last side length).
            BLOCK_RENEWAL: ``block`` half-length m (default 4) and ``fill``
            particles per dense site (default 2).
        seed: Seed of the initial-state hash domain
    """
    family: InitialFamily
    zeta: float
    params: Dict[str, Any] = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, 'family', InitialFamily.parse(self.family))
        if not self.zeta >= 0:
            raise ValueError(f"zeta must be non-negative, got {self.zeta}")
        if self.family is InitialFamily.BERNOULLI and self.zeta > 1:
            raise ValueError(f"Bernoulli family requires zeta <= 1, got {self.zeta}")

    def with_zeta(self, zeta: float) -> 'InitialStateSpec':
        return InitialStateSpec(self.family, zeta, dict(self.params), self.seed)

    def with_seed(self, seed: int) -> 'InitialStateSpec':
        return InitialStateSpec(self.family, self.zeta, dict(self.params), seed)

    def label(self) -> str:
        return self.family.value

    def to_dict(self) -> Dict[str, Any]:
        return {
            'family': self.family.value,
            'zeta': self.zeta,
            'params': dict(self.params),
            'seed': self.seed,
        }

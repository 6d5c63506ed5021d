"""
Module E: Coupling Schema
Embedding traces and coupling reports of the two-stage construction.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np

from src.module_a.schema import Configuration
from src.module_c.schema import Odometer


class EmbeddingTermination(Enum):
    """How the embedding stage ended."""
    EMBEDDED = "embedded"
    ROUND_CAP_EXCEEDED = "round_cap_exceeded"


class Enumeration(Enum):
    """Order in which the sites of A_k are toppled within a round."""
    RASTER = "raster"
    REVERSE = "reverse"


@dataclass
class RoundState:
    """Snapshot (eta_k, h_k) after round k."""
    counts: np.ndarray
    sleeping: np.ndarray
    odometer: np.ndarray

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RoundState):
            return NotImplemented
        return (np.array_equal(self.counts, other.counts)
                and np.array_equal(self.sleeping, other.sleeping)
                and np.array_equal(self.odometer, other.odometer))


@dataclass
class EmbeddingTrace:
    """
    Result of the embedding stage.

    Attributes:
        rounds: Rounds executed (non-empty A_k toppled)
        sizes: |A_k| for every executed round
        h0: Odometer h0' accumulated over the rounds
        eta0_prime: Configuration after the last round
        termination: EMBEDDED or ROUND_CAP_EXCEEDED
        history: Per-round (eta_k, h_k) snapshots when requested
    """
    rounds: int
    sizes: List[int]
    h0: Odometer
    eta0_prime: Configuration
    termination: EmbeddingTermination
    history: Optional[List[RoundState]] = None

    @property
    def embedded(self) -> bool:
        return self.termination is EmbeddingTermination.EMBEDDED

    def to_dict(self) -> Dict[str, Any]:
        return {
            'rounds': self.rounds,
            'sizes': list(self.sizes),
            'max_h0': self.h0.max(),
            'termination': self.termination.value,
        }


@dataclass
class CouplingReport:
    """
    Outcome of coupled_stabilize.

    The bound fields are None when the run aborted before they could be
    evaluated; ``aborted`` then names the stage that ran out of budget.

    Attributes:
        seed: Seed of the instruction field
        zeta1: Measured density of eta0
        zeta2: Measured density of xi0
        trace: Embedding stage trace
        h1: Odometer stabilizing xi0 under the shifted field
        m_emb: Odometer stabilizing eta0' under the shifted field
        m_direct: Odometer stabilizing eta0 under the original field
        embedding_violations: Sites with m_emb > h1'
        bound_violations: Sites with m_direct > h0' + h1'
        aborted: Stage that hit its cap, if any
    """
    seed: int
    zeta1: float
    zeta2: float
    trace: EmbeddingTrace
    h1: Optional[Odometer] = None
    m_emb: Optional[Odometer] = None
    m_direct: Optional[Odometer] = None
    embedding_violations: Optional[int] = None
    bound_violations: Optional[int] = None
    aborted: Optional[str] = None
    notes: List[str] = field(default_factory=list)

    @property
    def complete(self) -> bool:
        return self.aborted is None

    @property
    def embedding_bound_holds(self) -> Optional[bool]:
        return None if self.embedding_violations is None else self.embedding_violations == 0

    @property
    def coupling_bound_holds(self) -> Optional[bool]:
        return None if self.bound_violations is None else self.bound_violations == 0

    def to_record(self, **context: Any) -> Dict[str, Any]:
        """NDJSON object for this report."""
        record = dict(context)
        record.update({
            'seed': self.seed,
            'zeta1': self.zeta1,
            'zeta2': self.zeta2,
            'termination': self.trace.termination.value,
            'rounds': self.trace.rounds,
            'max_h0': self.trace.h0.max(),
            'max_h1': self.h1.max() if self.h1 is not None else None,
            'max_m_direct': self.m_direct.max() if self.m_direct is not None else None,
            'embedding_bound_holds': self.embedding_bound_holds,
            'coupling_bound_holds': self.coupling_bound_holds,
            'embedding_violations': self.embedding_violations,
            'bound_violations': self.bound_violations,
            'aborted': self.aborted,
        })
        return record


def round_state(config: Configuration, odometer: Odometer) -> RoundState:
    return RoundState(config.counts.copy(), config.sleeping.copy(), odometer.counts.copy())


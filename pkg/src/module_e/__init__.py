"""
Module E: Coupling
Two-stage comparison of a lower-density configuration with a higher-density
one: embed eta0 below xi0 by toppling the excess, then stabilize both with
the field shifted by the embedding odometer and check the odometer bounds.
"""

from .schema import CouplingReport, EmbeddingTermination, EmbeddingTrace, Enumeration, RoundState
from .embedding import DEFAULT_ROUND_CAP, embedding_stage, excess_sites, verify_embedding
from .coupled import coupled_stabilize, mismatched_control

__all__ = [
    'CouplingReport',
    'EmbeddingTermination',
    'EmbeddingTrace',
    'Enumeration',
    'RoundState',
    'DEFAULT_ROUND_CAP',
    'embedding_stage',
    'excess_sites',
    'verify_embedding',
    'coupled_stabilize',
    'mismatched_control',
]

"""
Module E: Embedding Stage
Topple every site where eta exceeds xi0 once per round until eta sits below xi0.

Round k computes A_k = {x : eta_{k-1}(x) > xi0(x)} in the N_s order, so a
sleeping particle above an empty site of xi0 counts as excess and is toppled
although the toppling is not legal. Every site of A_k is toppled exactly
once; by local abelianness the order inside a round does not matter.
"""

import logging
from typing import List, Optional, Set, Union

import numpy as np

from src.module_a.schema import Configuration
from src.module_b.instruction_field import InstructionField
from src.module_c.engine import Toppler
from src.module_c.schema import EffectKind, Odometer, Verdict, VerdictStatus

from .schema import (
    EmbeddingTermination,
    EmbeddingTrace,
    Enumeration,
    RoundState,
    round_state,
)

logger = logging.getLogger(__name__)

DEFAULT_ROUND_CAP = 10 ** 5


def excess_sites(eta: Configuration, xi_rank: np.ndarray) -> List[int]:
    """A = {x : eta(x) > xi0(x)}, recomputed from scratch, in raster order."""
    return [int(x) for x in np.flatnonzero(eta.order_rank() > xi_rank)]


def embedding_stage(eta0: Configuration, xi0: Configuration, field: InstructionField,
                    round_cap: int = DEFAULT_ROUND_CAP,
                    enumeration: Union[str, Enumeration] = Enumeration.RASTER,
                    incremental: bool = False,
                    cross_check: bool = False,
                    keep_history: bool = False) -> EmbeddingTrace:
    """
    Run the embedding stage of eta0 below xi0 with the given field.

    Args:
        eta0: Lower-density configuration
        xi0: Higher-density active configuration
        field: Instruction field shared with the later stabilizations
        round_cap: Maximum number of rounds
        enumeration: Order of topplings within a round
        incremental: Maintain A_k from the sites touched in the previous round
        cross_check: With ``incremental``, compare against the full recomputation
            every round
        keep_history: Record (eta_k, h_k) after every round

    Returns:
        EmbeddingTrace

    Raises:
        ValueError: domain mismatch, non-torus domain, sleeping sites in xi0
            or non-positive round cap
    """
    domain = eta0.domain
    if xi0.domain != domain or field.domain != domain:
        raise ValueError("eta0, xi0 and the field must share one domain")
    if not domain.is_torus:
        raise ValueError("The embedding stage runs on a torus")
    if not xi0.is_active_configuration():
        raise ValueError("xi0 must not contain sleeping sites")
    if round_cap <= 0:
        raise ValueError(f"round_cap must be positive, got {round_cap}")
    order = Enumeration(enumeration) if isinstance(enumeration, str) else enumeration

    eta = eta0.copy()
    h = Odometer.zeros(domain)
    xi_rank = xi0.order_rank()
    toppler = Toppler(field)
    total = eta.total_particles
    sizes: List[int] = []
    history: Optional[List[RoundState]] = [] if keep_history else None

    excess = excess_sites(eta, xi_rank)
    termination = EmbeddingTermination.EMBEDDED
    while excess:
        if len(sizes) >= round_cap:
            termination = EmbeddingTermination.ROUND_CAP_EXCEEDED
            break
        sizes.append(len(excess))
        sites = excess if order is Enumeration.RASTER else list(reversed(excess))

        touched: Set[int] = set()
        for x in sites:
            effect = toppler.topple(eta, h, x)
            touched.add(x)
            if effect.kind is EffectKind.JUMP:
                touched.add(effect.target)

        if history is not None:
            history.append(round_state(eta, h))
        logger.debug(f"Embedding round {len(sizes)}: |A|={len(excess)}")

        if incremental:
            rank = eta.order_rank()
            candidate = sorted(x for x in touched if rank[x] > xi_rank[x])
            if cross_check:
                reference = excess_sites(eta, xi_rank)
                if candidate != reference:
                    raise RuntimeError(f"Incremental excess set diverged in round {len(sizes)}")
            excess = candidate
        else:
            excess = excess_sites(eta, xi_rank)

    if eta.total_particles != total:
        raise RuntimeError("Embedding stage changed the particle count on a torus")
    if termination is EmbeddingTermination.ROUND_CAP_EXCEEDED:
        logger.warning(f"Embedding stage hit round cap {round_cap} with {len(excess)} excess sites")
    else:
        logger.debug(f"Embedded after {len(sizes)} rounds, max h0'={h.max()}")

    return EmbeddingTrace(
        rounds=len(sizes),
        sizes=sizes,
        h0=h,
        eta0_prime=eta,
        termination=termination,
        history=history,
    )


def verify_embedding(trace: EmbeddingTrace, xi0: Configuration) -> Verdict:
    """
    Check eta0' <= xi0 pointwise in the N_s order.

    Returns:
        NOT_APPLICABLE for a trace that hit its round cap, otherwise PASS or
        FAIL with the number of sites where eta0' exceeds xi0
    """
    if not trace.embedded:
        return Verdict(VerdictStatus.NOT_APPLICABLE, message="round cap exceeded")
    violations = int(np.count_nonzero(trace.eta0_prime.order_rank() > xi0.order_rank()))
    if violations:
        return Verdict(VerdictStatus.FAIL, violations, "eta0' exceeds xi0")
    return Verdict(VerdictStatus.PASS)

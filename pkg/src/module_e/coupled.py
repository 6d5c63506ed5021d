"""
Module E: Coupled Stabilization
Second stage of the coupling: stabilize with the shifted field and check the
odometer bounds against a direct stabilization of eta0.
"""

import logging
from typing import Optional

from src.module_a.schema import Configuration
from src.module_b.instruction_field import InstructionField
from src.module_c.engine import stabilize
from src.module_c.schema import Verdict, VerdictStatus
from src.module_d.generators import measured_density

from .embedding import DEFAULT_ROUND_CAP, embedding_stage
from .schema import CouplingReport

logger = logging.getLogger(__name__)


def coupled_stabilize(eta0: Configuration, xi0: Configuration, field: InstructionField,
                      round_cap: int = DEFAULT_ROUND_CAP,
                      cap: Optional[int] = None,
                      scheduler: str = "fifo") -> CouplingReport:
    """
    Embed eta0 below xi0, then compare odometers under the shifted field.

    With h0' from the embedding stage and I~ the field shifted by h0':
    h1' stabilizes xi0 under I~, m_emb stabilizes eta0' under I~ and m_direct
    stabilizes eta0 under the original field. The checks are m_emb <= h1' and
    m_direct <= h0' + h1', pointwise.

    Args:
        eta0: Lower-density configuration
        xi0: Higher-density active configuration
        field: Instruction field
        round_cap: Round cap of the embedding stage
        cap: Toppling cap of each stabilization
        scheduler: Scheduler used by the stabilizations

    Returns:
        CouplingReport; on cap exhaustion ``aborted`` names the stage and the
        later fields stay None
    """
    zeta1 = measured_density(eta0)
    zeta2 = measured_density(xi0)
    report_notes = []
    if zeta1 >= zeta2:
        logger.warning(f"Coupling run with zeta1={zeta1:.4f} >= zeta2={zeta2:.4f}")
        report_notes.append("zeta1 >= zeta2")

    trace = embedding_stage(eta0, xi0, field, round_cap=round_cap)
    report = CouplingReport(seed=field.seed, zeta1=zeta1, zeta2=zeta2, trace=trace,
                            notes=report_notes)
    if not trace.embedded:
        report.aborted = "embedding"
        return report

    tilde = field.shifted(trace.h0)
    high = stabilize(xi0, None, tilde, scheduler=scheduler, cap=cap)
    if not high.stable:
        report.aborted = "stabilize_xi0"
        return report
    report.h1 = high.increment

    embedded = stabilize(trace.eta0_prime, None, tilde, scheduler=scheduler, cap=cap)
    if not embedded.stable:
        report.aborted = "stabilize_eta0_prime"
        return report
    report.m_emb = embedded.increment
    report.embedding_violations = report.m_emb.violations(report.h1)

    direct = stabilize(eta0, None, field, scheduler=scheduler, cap=cap)
    if not direct.stable:
        report.aborted = "stabilize_eta0"
        return report
    report.m_direct = direct.increment
    report.bound_violations = report.m_direct.violations(trace.h0 + report.h1)

    if report.embedding_violations or report.bound_violations:
        logger.error(f"Coupling bound violated (seed {field.seed}): "
                     f"{report.embedding_violations} embedding, {report.bound_violations} direct")
    else:
        logger.debug(f"Coupling seed {field.seed}: rounds={trace.rounds} "
                     f"max h0'={trace.h0.max()} max h1'={report.h1.max()}")
    return report


def mismatched_control(eta0: Configuration, xi0: Configuration, field: InstructionField,
                       other: InstructionField,
                       round_cap: int = DEFAULT_ROUND_CAP,
                       cap: Optional[int] = None) -> Verdict:
    """
    Negative control: m_direct under ``field`` against h0' + h1' built from ``other``.

    Returns:
        FAIL with the violation count when the bound breaks (the expected
        outcome for unrelated fields), PASS when it happens to hold and
        NOT_APPLICABLE on cap exhaustion
    """
    trace = embedding_stage(eta0, xi0, other, round_cap=round_cap)
    if not trace.embedded:
        return Verdict(VerdictStatus.NOT_APPLICABLE, message="round cap exceeded")
    high = stabilize(xi0, None, other.shifted(trace.h0), cap=cap)
    direct = stabilize(eta0, None, field, cap=cap)
    if not (high.stable and direct.stable):
        return Verdict(VerdictStatus.NOT_APPLICABLE, message="cap exceeded")
    violations = direct.increment.violations(trace.h0 + high.increment)
    if violations:
        return Verdict(VerdictStatus.FAIL, violations, "bound broken with unrelated field")
    return Verdict(VerdictStatus.PASS)

"""
Module C: Abelian Structure Checks
Executable forms of global abelianness, the least action principle,
monotonicity, particle conservation and send/receive balance.
"""

import logging
from typing import Iterable, List, Optional, Sequence

import numpy as np

from src.module_a.schema import Configuration
from src.module_a.site_state import site_increment
from src.module_b.instruction_field import InstructionField

from .engine import Toppler, apply_sequence, stabilize
from .schedulers import SCHEDULERS
from .schema import (
    Odometer,
    StabilizeReport,
    ToppleSequence,
    Verdict,
    VerdictStatus,
    sites_of,
)

logger = logging.getLogger(__name__)


def check_scheduler_agreement(config: Configuration, field: InstructionField,
                              sites: Optional[Sequence[int]] = None,
                              schedulers: Iterable[str] = tuple(SCHEDULERS),
                              odometer: Optional[Odometer] = None,
                              cap: Optional[int] = None,
                              scheduler_seed: int = 0) -> Verdict:
    """
    Stabilize the same instance under several schedulers and compare.

    Returns:
        PASS when every final configuration and odometer coincide exactly,
        NOT_APPLICABLE when some run hit the cap
    """
    reports = [stabilize(config, odometer, field, sites, scheduler=name, cap=cap,
                         scheduler_seed=scheduler_seed)
               for name in schedulers]
    if any(not r.stable for r in reports):
        return Verdict(VerdictStatus.NOT_APPLICABLE, message="cap exceeded")

    reference = reports[0]
    mismatched = [r.scheduler for r in reports[1:]
                  if r.config != reference.config or r.odometer != reference.odometer]
    if mismatched:
        violations = max(int(np.count_nonzero(r.odometer.counts != reference.odometer.counts))
                         for r in reports[1:])
        logger.error(f"Schedulers {mismatched} disagree with {reference.scheduler}")
        return Verdict(VerdictStatus.FAIL, violations,
                       f"{mismatched} disagree with {reference.scheduler}")
    return Verdict(VerdictStatus.PASS)


def check_least_action(config: Configuration, field: InstructionField,
                       sites: Optional[Sequence[int]], alpha: ToppleSequence,
                       odometer: Optional[Odometer] = None,
                       cap: Optional[int] = None) -> Verdict:
    """
    Verify m_{V,eta,h} <= m_alpha for an acceptable sequence alpha stabilizing V.

    Returns:
        INVALID_INPUT when alpha is not acceptable or does not stabilize V;
        otherwise PASS or FAIL with the number of sites where m > m_alpha
    """
    v_sites = sites_of(config.domain, sites)
    applied = apply_sequence(config, odometer, field, alpha)
    if not applied.acceptable:
        return Verdict(VerdictStatus.INVALID_INPUT,
                       message=f"sequence not acceptable at step {applied.abort_index}")
    if not applied.config.is_stable_in(v_sites):
        return Verdict(VerdictStatus.INVALID_INPUT, message="sequence does not stabilize V")

    report = stabilize(config, odometer, field, v_sites, cap=cap)
    if not report.stable:
        return Verdict(VerdictStatus.NOT_APPLICABLE, message="cap exceeded")

    m_alpha = alpha.multiplicity(config.domain.n_sites)
    violations = report.increment.violations(m_alpha)
    if violations:
        return Verdict(VerdictStatus.FAIL, violations, "m_V exceeds m_alpha")
    return Verdict(VerdictStatus.PASS)


def add_active(config: Configuration, extra: Sequence[int]) -> Configuration:
    """Copy of ``config`` with extra[x] additional particles at every x (waking sleepers)."""
    result = config.copy()
    for x, k in enumerate(extra):
        for _ in range(int(k)):
            result.set_state(x, site_increment(result.state(x)))
    return result


def check_monotonicity(config: Configuration, extra: Sequence[int], field: InstructionField,
                       sites: Optional[Sequence[int]], larger_sites: Optional[Sequence[int]],
                       odometer: Optional[Odometer] = None,
                       cap: Optional[int] = None) -> Verdict:
    """
    Verify odometer(V, eta) <= odometer(V', eta') for V within V' and eta' = eta + extra.

    Both stabilizations use the same field and the same starting odometer.
    """
    v_small = sites_of(config.domain, sites)
    v_large = sites_of(config.domain, larger_sites)
    if not set(v_small) <= set(v_large):
        return Verdict(VerdictStatus.INVALID_INPUT, message="V is not contained in V'")
    if any(k < 0 for k in extra):
        return Verdict(VerdictStatus.INVALID_INPUT, message="extra particles must be non-negative")

    larger = add_active(config, extra)
    low = stabilize(config, odometer, field, v_small, cap=cap)
    high = stabilize(larger, odometer, field, v_large, cap=cap)
    if not (low.stable and high.stable):
        return Verdict(VerdictStatus.NOT_APPLICABLE, message="cap exceeded")

    violations = low.increment.violations(high.increment)
    if violations:
        return Verdict(VerdictStatus.FAIL, violations, "odometer not monotone")
    return Verdict(VerdictStatus.PASS)


def check_conservation(initial: Configuration, report: StabilizeReport,
                       added: int = 0) -> Verdict:
    """
    Particle bookkeeping of a stabilization.

    Torus: total count unchanged and nothing dissipated. Absorbing box:
    retained + dissipated = initial + added. Both: total sent = total received
    and topplings = sum of odometer increments.
    """
    problems: List[str] = []
    final = report.config
    if not final.check_totals():
        problems.append("cached totals out of sync")
    if initial.domain.is_torus and report.dissipated != 0:
        problems.append(f"torus dissipated {report.dissipated} particles")
    if final.total_particles + report.dissipated != initial.total_particles + added:
        problems.append(f"retained {final.total_particles} + dissipated {report.dissipated} "
                        f"!= {initial.total_particles + added}")
    if int(report.sent.sum()) != int(report.received.sum()):
        problems.append("sent and received totals differ")
    if report.topplings != report.increment.total():
        problems.append("topplings differ from odometer increment")
    if problems:
        return Verdict(VerdictStatus.FAIL, len(problems), "; ".join(problems))
    return Verdict(VerdictStatus.PASS)


def random_acceptable_stabilization(config: Configuration, field: InstructionField,
                                    sites: Optional[Sequence[int]],
                                    rng: np.random.Generator,
                                    odometer: Optional[Odometer] = None,
                                    wake_probability: float = 0.3,
                                    max_forced: Optional[int] = None,
                                    cap: int = 10 ** 7) -> Optional[ToppleSequence]:
    """
    Random acceptable sequence that stabilizes V, with forced wake-ups.

    At each step, with probability ``wake_probability`` (while the forced
    budget lasts) a sleeping site of V is toppled although it is not legal;
    otherwise a uniformly chosen unstable site of V is toppled.

    Returns:
        The sequence, or None when ``cap`` steps did not stabilize V
    """
    v_sites = sites_of(config.domain, sites)
    budget = len(v_sites) if max_forced is None else max_forced
    cfg = config.copy()
    odo = odometer.copy() if odometer is not None else Odometer.zeros(config.domain)
    toppler = Toppler(field)
    sequence: List[int] = []

    for _ in range(cap):
        unstable = cfg.unstable_sites(v_sites)
        if budget > 0 and rng.random() < wake_probability:
            sleepers = [x for x in v_sites if cfg.state(x).is_sleeping]
            if sleepers:
                x = sleepers[int(rng.integers(len(sleepers)))]
                toppler.topple(cfg, odo, x)
                sequence.append(x)
                budget -= 1
                continue
        if not unstable:
            return ToppleSequence(sequence)
        x = unstable[int(rng.integers(len(unstable)))]
        toppler.topple(cfg, odo, x)
        sequence.append(x)
    return None

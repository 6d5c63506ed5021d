"""
Property Suites
Randomized checks of the abelian structure, conservation, continuous-time
agreement, the coupling bounds and pigeonhole explosivity.

Every suite draws its instances from a seeded stream, so a failing instance
is reproduced by rerunning with the same seed.
"""

import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from src.config import SelftestConfig
from src.module_a.kernels import nearest_neighbour
from src.module_a.schema import Boundary, Configuration, Domain
from src.module_b.instruction_field import InstructionField
from src.module_c.abelian_checks import (
    check_conservation,
    check_least_action,
    check_monotonicity,
    check_scheduler_agreement,
    random_acceptable_stabilization,
)
from src.module_c.engine import stabilize
from src.module_c.schedulers import SCHEDULERS
from src.module_c.schema import Verdict, VerdictStatus
from src.module_d.generators import generate
from src.module_d.schema import InitialFamily, InitialStateSpec
from src.module_e.coupled import coupled_stabilize
from src.module_f.drive import placed_configuration, placement_sites
from src.module_f.gillespie import gillespie_run
from src.utils.streams import TAG_SELFTEST, generator

logger = logging.getLogger(__name__)

LAMBDAS = (0.1, 1.0, 10.0)
INSTANCE_CAP = 200_000


@dataclass
class SuiteResult:
    """Tally of one property suite."""
    name: str
    instances: int = 0
    passed: int = 0
    failed: int = 0
    not_applicable: int = 0
    seconds: float = 0.0
    failures: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def add(self, verdict: Verdict, context: str):
        self.instances += 1
        if verdict.status is VerdictStatus.PASS:
            self.passed += 1
        elif verdict.status is VerdictStatus.NOT_APPLICABLE:
            self.not_applicable += 1
        else:
            self.failed += 1
            self.failures.append(f"{context}: {verdict.status.value} {verdict.message}")
            logger.error(f"{self.name} failed on {context}: {verdict.message}")

    def to_record(self) -> Dict[str, object]:
        return {
            'experiment': 'selftest',
            'suite': self.name,
            'instances': self.instances,
            'passed': self.passed,
            'failed': self.failed,
            'not_applicable': self.not_applicable,
            'failures': self.failures[:10],
        }


@dataclass
class Instance:
    """A random small instance."""
    config: Configuration
    field: InstructionField
    label: str


def random_instance(rng: np.random.Generator, max_size: int, torus: Optional[bool] = None,
                    max_zeta: float = 0.9) -> Instance:
    """Random d in {1,2}, side length, boundary, lambda, density and seed."""
    dimension = int(rng.integers(1, 3))
    top = max_size if dimension == 1 else max(2, int(np.sqrt(max_size * 2)))
    side = int(rng.integers(2, top + 1))
    if torus is None:
        torus = bool(rng.random() < 0.5)
    domain = Domain.cube(dimension, side, Boundary.TORUS if torus else Boundary.ABSORBING)
    lam = float(LAMBDAS[int(rng.integers(len(LAMBDAS)))])
    zeta = float(rng.uniform(0.0, max_zeta))
    seed = int(rng.integers(2 ** 62))
    family = InitialFamily.POISSON if rng.random() < 0.5 else InitialFamily.BERNOULLI
    config = generate(InitialStateSpec(family, zeta, seed=seed), domain)
    field = InstructionField(seed, lam, nearest_neighbour(dimension), domain)
    label = f"{domain.describe()} lambda={lam:g} zeta={zeta:.3f} seed={seed}"
    return Instance(config, field, label)


def random_subset(rng: np.random.Generator, n_sites: int, probability: float = 0.7) -> List[int]:
    sites = [x for x in range(n_sites) if rng.random() < probability]
    return sites or [int(rng.integers(n_sites))]


def abelian_suite(count: int, seed: int, max_size: int) -> SuiteResult:
    """Four schedulers agree exactly; the fifo run conserves particles."""
    result = SuiteResult("abelian")
    rng = generator(seed, TAG_SELFTEST, 1)
    for _ in range(count):
        inst = random_instance(rng, max_size)
        verdict = check_scheduler_agreement(inst.config, inst.field, None, tuple(SCHEDULERS),
                                            cap=INSTANCE_CAP, scheduler_seed=int(rng.integers(2 ** 31)))
        if verdict.passed:
            report = stabilize(inst.config, None, inst.field, cap=INSTANCE_CAP)
            verdict = check_conservation(inst.config, report)
        result.add(verdict, inst.label)
    return result


def least_action_suite(count: int, seed: int, max_size: int) -> SuiteResult:
    """Legal stabilization never topples more than a random acceptable one."""
    result = SuiteResult("least_action")
    rng = generator(seed, TAG_SELFTEST, 2)
    for _ in range(count):
        inst = random_instance(rng, max_size)
        sites = random_subset(rng, inst.config.domain.n_sites)
        alpha = random_acceptable_stabilization(inst.config, inst.field, sites, rng,
                                                cap=INSTANCE_CAP)
        if alpha is None:
            result.add(Verdict(VerdictStatus.NOT_APPLICABLE, message="cap exceeded"), inst.label)
            continue
        result.add(check_least_action(inst.config, inst.field, sites, alpha, cap=INSTANCE_CAP),
                   inst.label)
    return result


def monotonicity_suite(count: int, seed: int, max_size: int) -> SuiteResult:
    """More particles and a larger V never decrease the odometer."""
    result = SuiteResult("monotonicity")
    rng = generator(seed, TAG_SELFTEST, 3)
    for _ in range(count):
        inst = random_instance(rng, max_size, max_zeta=0.6)
        n = inst.config.domain.n_sites
        large = random_subset(rng, n, 0.8)
        small = [x for x in large if rng.random() < 0.7] or large[:1]
        extra = [int(rng.random() < 0.2) for _ in range(n)]
        result.add(check_monotonicity(inst.config, extra, inst.field, small, large,
                                      cap=INSTANCE_CAP), inst.label)
    return result


def gillespie_suite(count: int, seed: int, max_size: int) -> SuiteResult:
    """Continuous-time transition counts equal the odometer on a torus."""
    result = SuiteResult("gillespie")
    rng = generator(seed, TAG_SELFTEST, 4)
    for _ in range(count):
        inst = random_instance(rng, max_size, torus=True)
        report = stabilize(inst.config, None, inst.field, cap=INSTANCE_CAP)
        trace = gillespie_run(inst.config, inst.field, seed=int(rng.integers(2 ** 31)),
                              max_events=INSTANCE_CAP, record_events=False)
        if not report.stable or trace.truncated:
            verdict = Verdict(VerdictStatus.NOT_APPLICABLE, message="cap exceeded")
        elif trace.counts == report.increment and trace.config == report.config:
            verdict = Verdict(VerdictStatus.PASS)
        else:
            verdict = Verdict(VerdictStatus.FAIL, trace.counts.violations(report.increment),
                              "transition counts differ from odometer")
        result.add(verdict, inst.label)
    return result


def coupling_suite(count: int, seed: int, size: int = 64, zeta1: float = 0.2,
                   zeta2: float = 0.5, lam: float = 1.0) -> SuiteResult:
    """Both coupling inequalities hold pointwise on a d=1 torus."""
    result = SuiteResult("coupling")
    domain = Domain.cube(1, size, Boundary.TORUS)
    kernel = nearest_neighbour(1)
    rng = generator(seed, TAG_SELFTEST, 5)
    for _ in range(count):
        run_seed = int(rng.integers(2 ** 62))
        eta0 = generate(InitialStateSpec(InitialFamily.POISSON, zeta1, seed=run_seed), domain)
        xi0 = generate(InitialStateSpec(InitialFamily.POISSON, zeta2, seed=run_seed + 1), domain)
        field = InstructionField(run_seed, lam, kernel, domain)
        report = coupled_stabilize(eta0, xi0, field, cap=INSTANCE_CAP)
        if not report.complete:
            verdict = Verdict(VerdictStatus.NOT_APPLICABLE, message=f"aborted in {report.aborted}")
        elif report.embedding_bound_holds and report.coupling_bound_holds:
            verdict = Verdict(VerdictStatus.PASS)
        else:
            verdict = Verdict(VerdictStatus.FAIL,
                              (report.embedding_violations or 0) + (report.bound_violations or 0),
                              "coupling bound violated")
        result.add(verdict, f"seed={run_seed}")
    return result


def pigeonhole_suite(count: int, seed: int, max_size: int, cap: int = 5_000) -> SuiteResult:
    """More particles than sites on a torus never stabilize."""
    result = SuiteResult("pigeonhole")
    rng = generator(seed, TAG_SELFTEST, 6)
    for _ in range(count):
        dimension = int(rng.integers(1, 3))
        side = int(rng.integers(2, (max_size if dimension == 1 else 4) + 1))
        domain = Domain.cube(dimension, side, Boundary.TORUS)
        n = domain.n_sites + int(rng.integers(1, domain.n_sites + 1))
        run_seed = int(rng.integers(2 ** 62))
        config = placed_configuration(domain, placement_sites(domain, n, run_seed))
        lam = float(LAMBDAS[int(rng.integers(len(LAMBDAS)))])
        field = InstructionField(run_seed, lam, nearest_neighbour(dimension), domain)
        report = stabilize(config, None, field, cap=cap)
        conservation = check_conservation(config, report)
        if report.stable:
            verdict = Verdict(VerdictStatus.FAIL, 1, "stabilized with more particles than sites")
        else:
            verdict = conservation
        result.add(verdict, f"{domain.describe()} particles={n} seed={run_seed}")
    return result


def run_selftest(config: SelftestConfig, seed: int = 0,
                 progress: Optional[Callable[[str], None]] = None) -> List[SuiteResult]:
    """
    Run every suite with the instance counts of ``config``.

    Args:
        config: Instance counts and maximum side length
        seed: Seed of the instance streams
        progress: Called with the suite name before it starts

    Returns:
        One SuiteResult per suite
    """
    suites: List[Tuple[str, Callable[[], SuiteResult]]] = [
        ('abelian', lambda: abelian_suite(config.abelian, seed, config.max_size)),
        ('least_action', lambda: least_action_suite(config.least_action, seed, config.max_size)),
        ('monotonicity', lambda: monotonicity_suite(config.monotonicity, seed, config.max_size)),
        ('gillespie', lambda: gillespie_suite(config.gillespie, seed, config.max_size)),
        ('coupling', lambda: coupling_suite(config.coupling, seed)),
        ('pigeonhole', lambda: pigeonhole_suite(config.pigeonhole, seed, config.max_size)),
    ]
    results = []
    for name, suite in suites:
        if progress:
            progress(name)
        start = time.perf_counter()
        result = suite()
        result.seconds = time.perf_counter() - start
        logger.info(f"Suite {name}: {result.passed}/{result.instances} passed, "
                    f"{result.not_applicable} not applicable, {result.failed} failed "
                    f"({result.seconds:.1f}s)")
        results.append(result)
    return results

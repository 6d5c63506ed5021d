"""
Module F: Density Scan
Stabilize generated configurations on a torus across a grid of densities.

Above the critical density the odometer grows with the torus, and beyond
density 1 no stable configuration exists at all, so every such run ends at
the toppling cap. The cap fraction and the mean odometer at sizes L and 2L
are the finite-volume proxies for explosivity.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from src.module_a.kernels import JumpKernel
from src.module_a.schema import Domain
from src.module_b.instruction_field import InstructionField
from src.module_c.abelian_checks import check_conservation
from src.module_c.engine import stabilize
from src.module_d.generators import generate
from src.module_d.schema import InitialStateSpec
from src.utils.parallel import map_tasks
from src.utils.streams import replica_seed

from .schema import ScanPoint, ScanResult, mean_and_se

logger = logging.getLogger(__name__)


def doubled(domain: Domain) -> Domain:
    """Domain with every side length doubled."""
    return Domain(tuple(2 * s for s in domain.shape), domain.boundary)


@dataclass(frozen=True)
class ScanTask:
    """One replica at one density and one domain size."""
    domain: Domain
    lam: float
    kernel: JumpKernel
    initial: InitialStateSpec
    replica: int
    seed: int
    scheduler: str
    cap: Optional[int]


def run_scan_replica(task: ScanTask) -> Dict[str, Any]:
    """Stabilize one replica of the scan and return its record."""
    config = generate(task.initial, task.domain)
    field = InstructionField(task.seed, task.lam, task.kernel, task.domain)
    report = stabilize(config, None, field, scheduler=task.scheduler, cap=task.cap)
    conservation = check_conservation(config, report)
    particles = max(config.total_particles, 1)
    return report.to_record(
        experiment='scan',
        family=task.initial.family.value,
        zeta=task.initial.zeta,
        size=list(task.domain.shape),
        replica=task.replica,
        seed=task.seed,
        density=config.density(),
        mean_odometer=report.increment.mean(),
        dissipated_fraction=report.dissipated / particles,
        slept_fraction=report.slept / report.topplings if report.topplings else 0.0,
        conservation=conservation.passed,
    )


def _summarise(zeta: float, chunk: List[Dict[str, Any]]) -> ScanPoint:
    stable = [r for r in chunk if r['termination'] == 'stable']
    values = [r['mean_odometer'] for r in stable]
    mean, se = mean_and_se(values)

    def avg(key: str) -> float:
        return float(np.mean([r[key] for r in stable])) if stable else float('nan')

    return ScanPoint(
        zeta=float(zeta),
        density=float(np.mean([r['density'] for r in chunk])),
        mean_odometer=mean,
        mean_odometer_se=se,
        topplings=avg('topplings'),
        dissipated_fraction=avg('dissipated_fraction'),
        slept_fraction=avg('slept_fraction'),
        cap_fraction=(len(chunk) - len(stable)) / len(chunk),
        values=values,
    )


def density_scan(domain: Domain, lam: float, kernel: JumpKernel, zeta_grid: Sequence[float],
                 initial: InitialStateSpec, replicas: int, seed: int,
                 scheduler: str = "fifo",
                 cap: Optional[int] = None,
                 compare_double: bool = False,
                 workers: int = 1,
                 progress: bool = False) -> ScanResult:
    """
    Replica statistics of whole-torus stabilization for every zeta.

    Args:
        domain: Torus
        lam: Sleep rate
        kernel: Jump kernel
        zeta_grid: Densities
        initial: Family template (its zeta and seed are replaced)
        replicas: Replicas per density
        seed: Experiment seed
        scheduler: Scheduler name
        cap: Toppling cap per stabilization
        compare_double: Also run on the torus with doubled sides
        workers: Worker processes
        progress: Show a progress bar

    Returns:
        ScanResult with per-replica NDJSON records
    """
    if not domain.is_torus:
        raise ValueError("density_scan runs on a torus")
    if replicas < 1:
        raise ValueError(f"replicas must be >= 1, got {replicas}")

    domains = [domain, doubled(domain)] if compare_double else [domain]
    tasks = [
        ScanTask(dom, lam, kernel, initial.with_zeta(z).with_seed(replica_seed(seed, r)),
                 r, replica_seed(seed, r), scheduler, cap)
        for dom in domains for z in zeta_grid for r in range(replicas)
    ]
    logger.info(f"Scan on {domain.describe()} ({initial.family.value}): "
                f"{len(zeta_grid)} densities x {replicas} replicas"
                f"{' at L and 2L' if compare_double else ''}")
    records = map_tasks(run_scan_replica, tasks, workers, desc="scan", progress=progress)

    per_size = len(zeta_grid) * replicas
    points: List[ScanPoint] = []
    for i, z in enumerate(zeta_grid):
        point = _summarise(z, records[i * replicas:(i + 1) * replicas])
        if compare_double:
            start = per_size + i * replicas
            double = _summarise(z, records[start:start + replicas])
            point.double_mean_odometer = double.mean_odometer
            if point.mean_odometer and np.isfinite(point.mean_odometer):
                point.divergence_ratio = double.mean_odometer / point.mean_odometer
        if point.cap_fraction:
            logger.warning(f"zeta={z:g}: cap hit in {point.cap_fraction:.0%} of replicas")
        logger.debug(f"zeta={z:g}: mean odometer {point.mean_odometer:.4f}")
        points.append(point)

    return ScanResult(points, initial.family.value, records)

"""
Module F: Driven-Dissipative Dynamics
Add particles to an absorbing box, stabilize, and record the retained density.

By the abelian property, adding all particles first and stabilizing once
gives the same final state and odometer as adding them one at a time with a
stabilization in between, provided the field and the placements are the
same. ``drive`` takes the batch shortcut; ``one_by_one_drive`` is the slow
path it is checked against.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from src.module_a.kernels import JumpKernel
from src.module_a.schema import Configuration, Domain
from src.module_a.site_state import site_increment
from src.module_b.instruction_field import InstructionField
from src.module_c.abelian_checks import check_conservation
from src.module_c.engine import stabilize
from src.module_c.schema import Odometer, StabilizeReport
from src.module_d.generators import generate
from src.module_d.schema import InitialFamily, InitialStateSpec
from src.utils.parallel import map_tasks
from src.utils.streams import TAG_PLACEMENT, generator, replica_seed

from .schema import CurvePoint, DriveCurve, DrivePath, mean_and_se

logger = logging.getLogger(__name__)


def placement_sites(domain: Domain, n_particles: int, seed: int) -> np.ndarray:
    """Uniform placement sites from the placement hash domain."""
    if n_particles < 0:
        raise ValueError(f"n_particles must be non-negative, got {n_particles}")
    rng = generator(seed, TAG_PLACEMENT, *domain.shape)
    return rng.integers(domain.n_sites, size=n_particles)


def placed_configuration(domain: Domain, sites: Sequence[int]) -> Configuration:
    """Active configuration holding one particle per placement."""
    counts = np.bincount(np.asarray(sites, dtype=np.int64), minlength=domain.n_sites)
    return Configuration.from_counts(domain, counts)


def _require_absorbing(domain: Domain):
    if domain.is_torus:
        raise ValueError("The driven-dissipative dynamics needs an absorbing box")


@dataclass(frozen=True)
class DriveTask:
    """One replica at one grid point."""
    domain: Domain
    lam: float
    kernel: JumpKernel
    initial: InitialStateSpec
    u: float
    replica: int
    seed: int
    exact: bool
    scheduler: str
    cap: Optional[int]


def _initial_for(task: DriveTask) -> Configuration:
    if task.exact:
        n = int(np.floor(task.u * task.domain.n_sites + 1e-9))
        return placed_configuration(task.domain, placement_sites(task.domain, n, task.seed))
    return generate(task.initial, task.domain)


def run_drive_replica(task: DriveTask) -> Dict[str, Any]:
    """Stabilize one replica of the drive and return its record."""
    initial = _initial_for(task)
    field = InstructionField(task.seed, task.lam, task.kernel, task.domain)
    report = stabilize(initial, None, field, scheduler=task.scheduler, cap=task.cap)
    conservation = check_conservation(initial, report)
    added = initial.total_particles
    retained = report.config.total_particles
    return report.to_record(
        experiment='drive',
        family='exact' if task.exact else task.initial.family.value,
        u=task.u,
        replica=task.replica,
        seed=task.seed,
        added=added,
        retained=retained,
        added_density=added / task.domain.n_sites,
        retained_density=retained / task.domain.n_sites,
        bound_ok=0 <= retained <= min(added, task.domain.n_sites),
        conservation=conservation.passed,
    )


def drive(domain: Domain, lam: float, kernel: JumpKernel, u_grid: Sequence[float],
          replicas: int, seed: int,
          family: InitialFamily = InitialFamily.POISSON,
          params: Optional[Dict[str, Any]] = None,
          exact: bool = False,
          scheduler: str = "fifo",
          cap: Optional[int] = None,
          workers: int = 1,
          progress: bool = False) -> DriveCurve:
    """
    Retained density zeta(u) over a grid of added densities.

    Every replica r uses the seed replica_seed(seed, r) for both the
    initial state and the instruction field at every u, so Poisson
    initial states are nested in u within a replica.

    Args:
        domain: Absorbing box
        lam: Sleep rate
        kernel: Jump kernel
        u_grid: Added densities
        replicas: Replicas per grid point
        seed: Experiment seed
        family: Initial-state family used to add density u
        params: Family parameters
        exact: Add exactly floor(u |box|) particles at uniform sites instead
        scheduler: Scheduler name
        cap: Toppling cap per stabilization
        workers: Worker processes
        progress: Show a progress bar

    Returns:
        DriveCurve with per-replica NDJSON records
    """
    _require_absorbing(domain)
    if replicas < 1:
        raise ValueError(f"replicas must be >= 1, got {replicas}")
    if any(u < 0 for u in u_grid):
        raise ValueError("u values must be non-negative")

    template = InitialStateSpec(family, 0.0, dict(params or {}))
    tasks = [
        DriveTask(domain, lam, kernel, template.with_zeta(u).with_seed(replica_seed(seed, r)),
                  float(u), r, replica_seed(seed, r), exact, scheduler, cap)
        for u in u_grid for r in range(replicas)
    ]
    logger.info(f"Drive on {domain.describe()}: {len(u_grid)} grid points x {replicas} replicas")
    records = map_tasks(run_drive_replica, tasks, workers, desc="drive", progress=progress)

    points: List[CurvePoint] = []
    for i, u in enumerate(u_grid):
        chunk = records[i * replicas:(i + 1) * replicas]
        stable = [r for r in chunk if r['termination'] == 'stable']
        values = [r['retained_density'] for r in stable]
        mean, se = mean_and_se(values)
        added = float(np.mean([r['added_density'] for r in chunk]))
        capped = len(chunk) - len(stable)
        if capped:
            logger.warning(f"u={u:g}: {capped}/{replicas} replicas hit the cap")
        points.append(CurvePoint(float(u), mean, se, values, added, capped))
        logger.debug(f"u={u:g}: zeta={mean:.4f} +- {se:.4f}")

    label = 'exact' if exact else template.family.value
    return DriveCurve(points, label, records)


def one_by_one_drive(domain: Domain, lam: float, kernel: JumpKernel, n_particles: int,
                     seed: int, scheduler: str = "fifo", cap: Optional[int] = None,
                     placements: Optional[Sequence[int]] = None) -> DrivePath:
    """
    Add particles one at a time, stabilizing the whole box after each.

    Args:
        domain: Absorbing box
        lam: Sleep rate
        kernel: Jump kernel
        n_particles: Particles to add
        seed: Seed of the instruction field and of the placements
        scheduler: Scheduler name
        cap: Toppling cap per stabilization
        placements: Explicit placement sites (default: drawn from ``seed``)

    Returns:
        DrivePath with the retained and dissipated counts after every addition
    """
    _require_absorbing(domain)
    sites = (placement_sites(domain, n_particles, seed) if placements is None
             else np.asarray(placements, dtype=np.int64))
    field = InstructionField(seed, lam, kernel, domain)

    config = Configuration.empty(domain)
    odometer = Odometer.zeros(domain)
    retained: List[int] = []
    dissipated: List[int] = []
    lost = 0
    capped = False
    for x in sites:
        x = int(x)
        config.set_state(x, site_increment(config.state(x)))
        report = stabilize(config, odometer, field, scheduler=scheduler, cap=cap)
        config, odometer = report.config, report.odometer
        lost += report.dissipated
        retained.append(config.total_particles)
        dissipated.append(lost)
        if not report.stable:
            capped = True
            logger.warning(f"One-by-one drive hit the cap after {len(retained)} additions")
            break

    return DrivePath([int(x) for x in sites[:len(retained)]], retained, dissipated,
                     config, odometer, capped)


def batch_drive(domain: Domain, lam: float, kernel: JumpKernel, placements: Sequence[int],
                seed: int, scheduler: str = "fifo", cap: Optional[int] = None) -> StabilizeReport:
    """All placements at once, then a single stabilization with the same field."""
    _require_absorbing(domain)
    field = InstructionField(seed, lam, kernel, domain)
    return stabilize(placed_configuration(domain, placements), None, field,
                     scheduler=scheduler, cap=cap)

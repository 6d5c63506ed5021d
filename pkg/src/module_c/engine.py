"""
Module C: Toppling Engine
Legal and acceptable topplings, toppling sequences and stabilization in V.

Toppling x applies the next unused instruction tau^{x,h(x)+1} to the
configuration and advances the odometer at x by one. A toppling is legal when
x holds an active particle and acceptable when x holds any particle.
"""

import logging
from functools import lru_cache
from typing import List, Optional, Sequence, Union

import numpy as np

from src.module_a.kernels import JumpKernel
from src.module_a.schema import EXITED, Configuration, Domain, NotAcceptableError
from src.module_a.site_state import site_decrement, site_increment, site_sleep
from src.module_b.instruction_field import InstructionCursor, InstructionField
from src.module_b.schema import SLEEP_CODE

from .schedulers import Scheduler, make_scheduler
from .schema import (
    EffectKind,
    Odometer,
    SequenceResult,
    StabilizeReport,
    StepFlag,
    Termination,
    ToppleEffect,
    ToppleSequence,
    sites_of,
)

logger = logging.getLogger(__name__)

DEFAULT_CAP_FACTOR = 10 ** 6


def is_legal(config: Configuration, site: int) -> bool:
    """Toppling ``site`` is legal iff it holds an active particle."""
    return config.state(site).is_active


def is_acceptable(config: Configuration, site: int) -> bool:
    """Toppling ``site`` is acceptable iff it is not empty."""
    return not config.state(site).is_empty


@lru_cache(maxsize=64)
def _jump_targets(domain: Domain, kernel: JumpKernel) -> List[List[int]]:
    return domain.jump_table(kernel.offsets).tolist()


class Toppler:
    """
    Applies topplings under one instruction field.

    Holds the jump-target table of the field's domain and kernel and a
    buffered cursor over the field.
    """

    def __init__(self, field: InstructionField):
        self.field = field
        self.cursor = InstructionCursor(field)
        self.targets = _jump_targets(field.domain, field.kernel)

    def topple(self, config: Configuration, odometer: Odometer, site: int) -> ToppleEffect:
        """
        Topple ``site`` in place.

        Raises:
            NotAcceptableError: the site is empty (nothing is modified)
        """
        state = config.state(site)
        if state.is_empty:
            raise NotAcceptableError(f"not acceptable: toppling empty site {site}")

        index = odometer[site] + 1
        code = self.cursor.code(site, index)
        legal = state.is_active

        if code == SLEEP_CODE:
            after = site_sleep(state)
            config.set_state(site, after)
            effect = ToppleEffect(site, index, EffectKind.SLEEP,
                                  slept=after.is_sleeping and not state.is_sleeping, legal=legal)
        else:
            target = self.targets[code - 1][site]
            config.set_state(site, site_decrement(state))
            if target == EXITED:
                effect = ToppleEffect(site, index, EffectKind.EXIT, legal=legal)
            else:
                config.set_state(target, site_increment(config.state(target)))
                effect = ToppleEffect(site, index, EffectKind.JUMP, target=target, legal=legal)

        odometer.increment(site)
        return effect


def topple(config: Configuration, odometer: Odometer, field: InstructionField,
           site: int) -> ToppleEffect:
    """
    Apply Phi_x: one toppling of ``site`` (mutates config and odometer).

    Args:
        config: Configuration, updated in place
        odometer: Odometer, updated in place
        field: Instruction field
        site: Site to topple; must be acceptable

    Returns:
        ToppleEffect describing what happened
    """
    return Toppler(field).topple(config, odometer, site)


def stabilize(config: Configuration, odometer: Optional[Odometer], field: InstructionField,
              sites: Optional[Sequence[int]] = None,
              scheduler: Union[str, Scheduler] = "fifo",
              cap: Optional[int] = None,
              record_sequence: bool = False,
              scheduler_seed: int = 0) -> StabilizeReport:
    """
    Perform legal topplings of sites in V until V is stable.

    The inputs are not modified. On STABLE the odometer increment equals
    m_{V,eta,h}; particles that jump out of V but stay in the domain
    accumulate there untoppled.

    Args:
        config: Initial configuration
        odometer: Initial odometer (None for zero)
        field: Instruction field
        sites: V as raster indices (None for the whole domain)
        scheduler: Scheduler name or instance
        cap: Maximum number of topplings (default 10^6 * |V|)
        record_sequence: Keep the toppled sites in order
        scheduler_seed: Seed for the random scheduler

    Returns:
        StabilizeReport
    """
    domain = config.domain
    if field.domain != domain:
        raise ValueError("Instruction field and configuration live on different domains")
    v_sites = sites_of(domain, sites)
    if cap is None:
        cap = DEFAULT_CAP_FACTOR * max(len(v_sites), 1)
    if cap <= 0:
        raise ValueError(f"cap must be positive, got {cap}")

    cfg = config.copy()
    initial = odometer.copy() if odometer is not None else Odometer.zeros(domain)
    odo = initial.copy()

    sched = make_scheduler(scheduler, scheduler_seed) if isinstance(scheduler, str) else scheduler
    sched.start(cfg, v_sites)
    toppler = Toppler(field)

    n = domain.n_sites
    sent = [0] * n
    received = [0] * n
    sequence: Optional[List[int]] = [] if record_sequence else None
    topplings = dissipated = slept = 0
    termination = Termination.STABLE

    while True:
        x = sched.next_site()
        if x is None:
            break
        if topplings >= cap:
            termination = Termination.CAP_EXCEEDED
            break
        effect = toppler.topple(cfg, odo, x)
        topplings += 1
        if effect.kind is EffectKind.JUMP:
            sent[x] += 1
            received[effect.target] += 1
            sched.notify(effect.target)
        elif effect.kind is EffectKind.EXIT:
            dissipated += 1
        elif effect.slept:
            slept += 1
        sched.notify(x)
        if sequence is not None:
            sequence.append(x)

    if termination is Termination.STABLE and not cfg.is_stable_in(v_sites):
        raise RuntimeError(f"Scheduler '{sched.name}' stopped with unstable sites in V")
    if termination is Termination.CAP_EXCEEDED:
        logger.warning(f"Stabilization hit cap of {cap} topplings "
                       f"({cfg.total_active} active particles left)")
    else:
        logger.debug(f"Stabilized {domain.describe()} with {topplings} topplings "
                     f"({sched.name}), dissipated {dissipated}")

    return StabilizeReport(
        config=cfg,
        odometer=odo,
        initial_odometer=initial,
        topplings=topplings,
        dissipated=dissipated,
        slept=slept,
        termination=termination,
        scheduler=sched.name,
        sent=np.asarray(sent, dtype=np.int64),
        received=np.asarray(received, dtype=np.int64),
        sequence=sequence,
    )


def apply_sequence(config: Configuration, odometer: Optional[Odometer], field: InstructionField,
                   alpha: Union[ToppleSequence, Sequence[int]]) -> SequenceResult:
    """
    Apply Phi_alpha = Phi_{x_k} o ... o Phi_{x_1}, classifying every step.

    Stops at the first step that is not acceptable; the inputs are not modified.

    Returns:
        SequenceResult with per-step flags and abort index
    """
    seq = alpha if isinstance(alpha, ToppleSequence) else ToppleSequence(list(alpha))
    seq.validate(config.domain)
    cfg = config.copy()
    odo = odometer.copy() if odometer is not None else Odometer.zeros(config.domain)
    toppler = Toppler(field)

    flags: List[StepFlag] = []
    effects: List[ToppleEffect] = []
    for i, x in enumerate(seq):
        state = cfg.state(x)
        if state.is_empty:
            flags.append(StepFlag.INVALID)
            logger.debug(f"Sequence aborted at step {i}: site {x} is empty")
            return SequenceResult(cfg, odo, flags, abort_index=i, effects=effects)
        flags.append(StepFlag.LEGAL if state.is_active else StepFlag.ACCEPTABLE)
        effects.append(toppler.topple(cfg, odo, x))

    return SequenceResult(cfg, odo, flags, effects=effects)

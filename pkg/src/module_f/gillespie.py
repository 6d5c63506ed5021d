"""
Module F: Continuous-Time Evolution
Event-driven simulation where every site rings at rate (1+lambda) times its
number of active particles.

The transition applied at a ringing site is the next unused instruction of
the same field the discrete engine reads, so on reaching a stable state the
per-site transition counts equal the stabilization odometer exactly.
"""

import logging
import math
from typing import List, Optional

import numpy as np

from src.module_a.schema import Configuration
from src.module_b.instruction_field import InstructionField
from src.module_c.engine import Toppler
from src.module_c.schema import EffectKind, Odometer
from src.utils.streams import TAG_GILLESPIE, generator

from .schema import EventKind, GillespieEvent, GillespieTrace

logger = logging.getLogger(__name__)

DEFAULT_MAX_EVENTS = 10 ** 7

_EVENT_KIND = {
    EffectKind.JUMP: EventKind.JUMP,
    EffectKind.EXIT: EventKind.EXIT,
    EffectKind.SLEEP: EventKind.SLEEP,
}


def total_rate(config: Configuration, lam: float) -> float:
    """R = (1 + lambda) * sum over sites of active particles."""
    return (1.0 + lam) * config.total_active


def gillespie_run(config: Configuration, field: InstructionField,
                  horizon: float = math.inf,
                  seed: int = 0,
                  max_events: int = DEFAULT_MAX_EVENTS,
                  record_events: bool = True) -> GillespieTrace:
    """
    Run the continuous-time dynamics until every site is stable or time runs out.

    Args:
        config: Initial configuration (not modified)
        field: Instruction field; its lambda sets the clock rates
        horizon: Time horizon
        seed: Seed of the clock and site-choice stream
        max_events: Event budget
        record_events: Keep the (time, site, transition) log

    Returns:
        GillespieTrace; ``truncated`` is set when the horizon or the event
        budget stopped the run with active particles left
    """
    if field.domain != config.domain:
        raise ValueError("Instruction field and configuration live on different domains")
    rng = generator(seed, TAG_GILLESPIE)
    cfg = config.copy()
    counts = Odometer.zeros(config.domain)
    toppler = Toppler(field)
    events: List[GillespieEvent] = []
    weights = cfg.active_counts().astype(np.float64)

    t = 0.0
    n_events = 0
    truncated = False
    while cfg.total_active > 0:
        if n_events >= max_events:
            truncated = True
            logger.warning(f"Gillespie run stopped after {max_events} events at t={t:.4f}")
            break
        rate = total_rate(cfg, field.lam)
        t_next = t + rng.exponential(1.0 / rate)
        if t_next > horizon:
            truncated = True
            logger.info(f"Gillespie run reached horizon {horizon} with "
                        f"{cfg.total_active} active particles")
            break
        t = t_next

        cumulative = np.cumsum(weights)
        x = int(np.searchsorted(cumulative, rng.random() * cumulative[-1], side='right'))
        x = min(x, len(weights) - 1)
        effect = toppler.topple(cfg, counts, x)

        weights[x] = _active_at(cfg, x)
        if effect.target is not None:
            weights[effect.target] = _active_at(cfg, effect.target)
        n_events += 1
        if record_events:
            events.append(GillespieEvent(t, x, _EVENT_KIND[effect.kind]))

    logger.debug(f"Gillespie run: {n_events} events, t={t:.4f}, truncated={truncated}")
    return GillespieTrace(events, counts, cfg, t, truncated, n_events)


def _active_at(config: Configuration, site: int) -> float:
    state = config.state(site)
    return float(state.n) if state.is_active else 0.0


def site_rate(config: Configuration, site: int, lam: float) -> float:
    """Clock rate (1 + lambda) times the active particles at ``site``."""
    return (1.0 + lam) * _active_at(config, site)


def fixation_matches_stabilization(trace: GillespieTrace, odometer: Odometer) -> Optional[bool]:
    """Per-site transition counts equal ``odometer``; None for a truncated trace."""
    if trace.truncated:
        return None
    return trace.counts == odometer

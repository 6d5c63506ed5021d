"""
Module C: Toppling Engine
Legal and acceptable topplings, stabilization under interchangeable
schedulers, and executable checks of the abelian structure.
"""

from .schema import (
    EffectKind,
    Odometer,
    SequenceResult,
    StabilizeReport,
    StepFlag,
    Termination,
    ToppleEffect,
    ToppleSequence,
    Verdict,
    VerdictStatus,
)
from .engine import Toppler, apply_sequence, is_acceptable, is_legal, stabilize, topple
from .schedulers import SCHEDULERS, Scheduler, make_scheduler
from .abelian_checks import (
    add_active,
    check_conservation,
    check_least_action,
    check_monotonicity,
    check_scheduler_agreement,
    random_acceptable_stabilization,
)

__all__ = [
    'EffectKind', 'Odometer', 'SequenceResult', 'StabilizeReport', 'StepFlag',
    'Termination', 'ToppleEffect', 'ToppleSequence', 'Verdict', 'VerdictStatus',
    'Toppler', 'apply_sequence', 'is_acceptable', 'is_legal', 'stabilize', 'topple',
    'SCHEDULERS', 'Scheduler', 'make_scheduler',
    'add_active', 'check_conservation', 'check_least_action', 'check_monotonicity',
    'check_scheduler_agreement', 'random_acceptable_stabilization',
]

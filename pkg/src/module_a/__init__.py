"""
Module A: Lattice Core

This module provides:
- Site states of N_s = {0, s, 1, 2, ...} and their arithmetic
- Finite domains (torus or absorbing box) and configurations over them
- Finite-support jump kernels with exact lattice-generation checks
- The plain-text snapshot format
"""

from .site_state import (
    EMPTY,
    SLEEPING,
    NotAcceptableError,
    SiteState,
    SiteTag,
    active_count,
    particle_count,
    site_decrement,
    site_increment,
    site_sleep,
)
from .schema import EXITED, Boundary, Configuration, Domain, config_le
from .kernels import JumpKernel, KernelValidationError, kernel_validate

__all__ = [
    "EMPTY",
    "SLEEPING",
    "EXITED",
    "NotAcceptableError",
    "SiteState",
    "SiteTag",
    "Boundary",
    "Configuration",
    "Domain",
    "JumpKernel",
    "KernelValidationError",
    "active_count",
    "particle_count",
    "site_decrement",
    "site_increment",
    "site_sleep",
    "config_le",
    "kernel_validate",
]

"""
Module B: Instruction Field

This module provides the site-wise representation of the dynamics: an i.i.d.
stack of sleep/jump instructions at every site, realised by stateless
counter-based hashing so that any tau^{x,j} can be read at random access and
shifted fields share the tail of the original bit-for-bit.
"""

from .schema import SLEEP_CODE, Instruction, InstructionKind
from .instruction_field import (
    InstructionCursor,
    InstructionField,
    instruction_at,
    shifted_field,
)

__all__ = [
    "SLEEP_CODE",
    "Instruction",
    "InstructionKind",
    "InstructionCursor",
    "InstructionField",
    "instruction_at",
    "shifted_field",
]

"""
Schema definitions for Module B: Instruction Field

An instruction tells a toppled site what to do with one of its particles:
fall asleep or jump by an offset from the kernel support.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Dict, Any, Optional, Tuple

# Integer code of the sleep instruction; code k >= 1 is a jump by kernel entry k-1.
SLEEP_CODE = 0


class InstructionKind(Enum):
    """Instruction tags."""
    SLEEP = "sleep"
    JUMP = "jump"


@dataclass(frozen=True)
class Instruction:
    """
    One entry tau^{x,j} of the instruction field.

    Attributes:
        kind: SLEEP or JUMP
        offset: Jump vector (None for SLEEP)
    """
    kind: InstructionKind
    offset: Optional[Tuple[int, ...]] = None

    @classmethod
    def sleep(cls) -> 'Instruction':
        return cls(InstructionKind.SLEEP)

    @classmethod
    def jump(cls, offset: Tuple[int, ...]) -> 'Instruction':
        return cls(InstructionKind.JUMP, tuple(offset))

    @property
    def is_sleep(self) -> bool:
        return self.kind is InstructionKind.SLEEP

    def to_dict(self) -> Dict[str, Any]:
        return {
            'kind': self.kind.value,
            'offset': list(self.offset) if self.offset is not None else None,
        }

    def __repr__(self) -> str:
        if self.is_sleep:
            return "Sleep"
        return f"Jump({', '.join(f'{c:+d}' for c in self.offset)})"

"""Test fixtures for arw-lab tests."""

from pathlib import Path
from typing import Dict, Optional, Sequence, Union

import numpy as np

from src.module_a.kernels import JumpKernel
from src.module_a.schema import Domain
from src.module_b.instruction_field import InstructionField
from src.module_b.schema import SLEEP_CODE

# Fixture directory
FIXTURES_DIR = Path(__file__).parent

# Instruction shorthand for scripted stacks: "S" is Sleep, an offset tuple is a jump.
SLEEP = "S"
RIGHT = (1,)
LEFT = (-1,)

Step = Union[str, Sequence[int]]


class ScriptedField(InstructionField):
    """
    Instruction field whose first stack entries are fixed by hand.

    ``script[x][j-1]`` is tau^{x,j}; indices past the script fall back to the
    hashed stream of ``seed``. Shifts apply to scripted entries as well.
    """

    def __init__(self, script: Dict[int, Sequence[Step]], lam: float, kernel: JumpKernel,
                 domain: Domain, seed: int = 0, shift: Optional[np.ndarray] = None):
        super().__init__(seed, lam, kernel, domain, shift=shift)
        self.script = {int(x): [self._encode(step) for step in steps]
                       for x, steps in script.items()}

    def _encode(self, step: Step) -> int:
        if isinstance(step, str):
            if step != SLEEP:
                raise ValueError(f"Unknown scripted step {step!r}")
            return SLEEP_CODE
        return self.kernel.offsets.index(tuple(step)) + 1

    def codes(self, site: int, start: int, count: int) -> np.ndarray:
        steps = self.script.get(site, [])
        out = []
        for j in range(start, start + count):
            position = j + int(self.shift[site]) - 1
            if position < len(steps):
                out.append(steps[position])
            else:
                out.append(int(super().codes(site, j, 1)[0]))
        return np.asarray(out, dtype=np.int64)

    def shifted(self, h0) -> 'ScriptedField':
        counts = np.asarray(getattr(h0, 'counts', h0), dtype=np.int64).reshape(-1)
        field = ScriptedField({}, self.lam, self.kernel, self.domain, self.seed,
                              shift=self.shift + counts)
        field.script = self.script
        return field


# Sample run configuration for testing
SAMPLE_CONFIG_YAML = """\
experiment: scan
domain:
  dimension: 1
  size: 16
  boundary: torus
model:
  lambda: 1.0
  kernel: nn
initial:
  family: poisson
  zeta: 0.3
grid:
  zeta: [0.1, 0.2]
  u: {start: 0.0, stop: 1.0, step: 0.25}
  replicas: 2
engine:
  seed: 7
  scheduler: fifo
  workers: 1
"""

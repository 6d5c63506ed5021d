"""
Module B: Instruction Field
Pure per-site instruction stacks tau^{x,j}, realised by counter-based hashing.

The j-th instruction at site x is obtained by hashing (seed, geometry, x,
j + shift(x)) into a uniform variate and reading it against the cumulative
table [lambda/(1+lambda), p_1/(1+lambda), ..., p_k/(1+lambda)], ordered Sleep
first and then the kernel entries in file order.
"""

import logging
from typing import Any, Dict, List, Optional

import numpy as np

from src.module_a.kernels import JumpKernel
from src.module_a.schema import Domain
from src.utils.streams import (
    TAG_INSTRUCTIONS,
    geometry_key,
    site_keys,
    stream_key,
    uniforms_at,
)

from .schema import Instruction

logger = logging.getLogger(__name__)

TABLE_ORDERING = "sleep-first, then kernel entries in file order"


class InstructionField:
    """
    Deterministic instruction field over a domain.

    Instances are immutable: every query is a pure function of
    (seed, site, index + shift(site), lambda, kernel).
    """

    def __init__(self, seed: int, lam: float, kernel: JumpKernel, domain: Domain,
                 shift: Optional[np.ndarray] = None, _keys: Optional[np.ndarray] = None):
        """
        Initialize an instruction field.

        Args:
            seed: 64-bit seed
            lam: Sleep rate lambda > 0
            kernel: Jump kernel
            domain: Domain whose raster indices address the sites
            shift: Per-site non-negative offset into the streams (default zero)
        """
        if not lam > 0:
            raise ValueError(f"lambda must be positive, got {lam}")
        if kernel.dimension != domain.dimension:
            raise ValueError(f"Kernel dimension {kernel.dimension} does not match "
                             f"domain dimension {domain.dimension}")

        self.seed = int(seed)
        self.lam = float(lam)
        self.kernel = kernel
        self.domain = domain

        n = domain.n_sites
        if shift is None:
            shift = np.zeros(n, dtype=np.int64)
        shift = np.asarray(shift, dtype=np.int64).reshape(-1)
        if shift.shape != (n,):
            raise ValueError(f"Shift needs {n} entries, got {shift.shape[0]}")
        if np.any(shift < 0):
            raise ValueError("Shift must be non-negative everywhere")
        self._shift = shift.copy()
        self._shift.flags.writeable = False

        if _keys is None:
            _keys = site_keys(stream_key(self.seed, TAG_INSTRUCTIONS, geometry_key(domain.shape)), n)
        self._keys = _keys

        weights = [self.lam] + kernel.probabilities
        cumulative = np.cumsum(np.asarray(weights, dtype=np.float64)) / (1.0 + self.lam)
        cumulative[-1] = 1.0
        self._cumulative = cumulative
        self._instructions = [Instruction.sleep()] + [Instruction.jump(o) for o in kernel.offsets]

    @property
    def shift(self) -> np.ndarray:
        return self._shift

    @property
    def sleep_probability(self) -> float:
        return self.lam / (1.0 + self.lam)

    def codes(self, site: int, start: int, count: int) -> np.ndarray:
        """
        Instruction codes for indices start..start+count-1 at ``site``.

        Code 0 is Sleep, code k >= 1 is a jump by kernel entry k-1.
        """
        if start < 1:
            raise ValueError(f"Instruction indices start at 1, got {start}")
        counters = np.arange(start, start + count, dtype=np.uint64) + np.uint64(self._shift[site])
        u = uniforms_at(self._keys[site], counters)
        return np.minimum(np.searchsorted(self._cumulative, u, side='right'),
                          len(self._cumulative) - 1)

    def code_at(self, site: int, index: int) -> int:
        return int(self.codes(site, index, 1)[0])

    def decode(self, code: int) -> Instruction:
        return self._instructions[code]

    def instruction_at(self, site: int, index: int) -> Instruction:
        """The instruction tau^{site,index}; index >= 1."""
        if index < 1:
            raise ValueError(f"Instruction index must be >= 1, got {index}")
        if not 0 <= site < self.domain.n_sites:
            raise ValueError(f"Site {site} outside domain {self.domain.shape}")
        return self.decode(self.code_at(site, index))

    def shifted(self, h0: Any) -> 'InstructionField':
        """
        Field with the first h0(x) instructions of every site deleted.

        Args:
            h0: Odometer or array of per-site non-negative counts
        """
        counts = np.asarray(getattr(h0, 'counts', h0), dtype=np.int64).reshape(-1)
        if np.any(counts < 0):
            raise ValueError("Shift odometer must be non-negative")
        return InstructionField(self.seed, self.lam, self.kernel, self.domain,
                                shift=self._shift + counts, _keys=self._keys)

    def table_description(self) -> Dict[str, Any]:
        """Normative cumulative table, recorded in run manifests."""
        return {
            'ordering': TABLE_ORDERING,
            'labels': ['sleep'] + [list(o) for o in self.kernel.offsets],
            'cumulative': [float(c) for c in self._cumulative],
        }

    def __repr__(self) -> str:
        return (f"InstructionField(seed={self.seed}, lambda={self.lam}, "
                f"kernel={self.kernel.kernel_id}, domain={self.domain.describe()})")


class InstructionCursor:
    """
    Block-buffered reader over a field for the hot toppling loops.

    Buffers are a cache of pure values: reading through a cursor returns
    exactly field.code_at(site, index).
    """

    def __init__(self, field: InstructionField, block: int = 64):
        self.field = field
        self.block = block
        self._buffers: Dict[int, List[int]] = {}
        self._starts: Dict[int, int] = {}

    def code(self, site: int, index: int) -> int:
        start = self._starts.get(site)
        if start is None or not start <= index < start + self.block:
            start = index
            self._buffers[site] = self.field.codes(site, start, self.block).tolist()
            self._starts[site] = start
        return self._buffers[site][index - start]


def instruction_at(field: InstructionField, site: int, index: int) -> Instruction:
    """Module-level form of InstructionField.instruction_at."""
    return field.instruction_at(site, index)


def shifted_field(field: InstructionField, h0: Any) -> InstructionField:
    """Field whose stream at x starts after the first h0(x) instructions."""
    return field.shifted(h0)

"""
Module A: Jump Kernels
Finite-support jump distributions p(.), their validation and builtin catalogue.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Any, List, Optional, Sequence, Tuple

import yaml

logger = logging.getLogger(__name__)

PROBABILITY_TOLERANCE = 1e-12

Offset = Tuple[int, ...]


class KernelValidationError(ValueError):
    """Raised when a kernel fails validation; carries the failed conditions."""

    def __init__(self, kernel_id: str, failures: List[str]):
        self.kernel_id = kernel_id
        self.failures = failures
        super().__init__(f"Kernel '{kernel_id}' rejected: " + "; ".join(failures))


@dataclass(frozen=True)
class JumpKernel:
    """
    Jump distribution with finite support.

    Attributes:
        dimension: Lattice dimension d
        entries: (offset, probability) pairs in file order
        kernel_id: Short identifier used in records
    """
    dimension: int
    entries: Tuple[Tuple[Offset, float], ...]
    kernel_id: str = "custom"

    def __post_init__(self):
        entries = tuple((tuple(int(c) for c in offset), float(p)) for offset, p in self.entries)
        object.__setattr__(self, 'entries', entries)

    @property
    def offsets(self) -> List[Offset]:
        return [offset for offset, _ in self.entries]

    @property
    def probabilities(self) -> List[float]:
        return [p for _, p in self.entries]

    def rescaled(self, factor: float) -> 'JumpKernel':
        """Kernel with every probability multiplied by ``factor`` then renormalised."""
        scaled = [p * factor for p in self.probabilities]
        total = sum(scaled)
        return JumpKernel(self.dimension,
                          tuple((o, p / total) for o, p in zip(self.offsets, scaled)),
                          self.kernel_id)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'id': self.kernel_id,
            'dimension': self.dimension,
            'entries': [{'offset': list(o), 'p': p} for o, p in self.entries],
        }


@dataclass
class KernelDiagnostic:
    """Outcome of kernel_validate."""
    ok: bool
    failures: List[str] = field(default_factory=list)
    lattice_index: Optional[int] = None


def lattice_index(vectors: Sequence[Sequence[int]], dimension: int) -> int:
    """
    Index of the integer lattice spanned by ``vectors`` inside Z^d.

    Column-wise Euclidean reduction brings the generators to echelon form; the
    index is the absolute product of the pivots. Returns 0 when the span has
    rank < d.
    """
    rows = [list(v) for v in vectors if any(v)]
    index = 1
    for col in range(dimension):
        while True:
            nonzero = sorted((r for r in rows if r[col] != 0), key=lambda r: abs(r[col]))
            if len(nonzero) <= 1:
                break
            pivot = nonzero[0]
            for r in nonzero[1:]:
                q = r[col] // pivot[col]
                for i in range(dimension):
                    r[i] -= q * pivot[i]
            rows = [r for r in rows if any(r)]
        nonzero = [r for r in rows if r[col] != 0]
        if not nonzero:
            return 0
        pivot = nonzero[0]
        index *= abs(pivot[col])
        rows = [r for r in rows if r is not pivot]
    return index


def kernel_validate(kernel: JumpKernel) -> KernelDiagnostic:
    """
    Check that a kernel is a probability distribution whose support generates Z^d.

    Args:
        kernel: Kernel to check

    Returns:
        KernelDiagnostic listing every failed condition
    """
    failures = []
    if not kernel.entries:
        return KernelDiagnostic(False, ["empty kernel table"])

    if kernel.dimension < 1:
        failures.append(f"dimension must be >= 1, got {kernel.dimension}")

    for offset, p in kernel.entries:
        if len(offset) != kernel.dimension:
            failures.append(f"offset {offset} does not have dimension {kernel.dimension}")
        if not any(offset):
            failures.append("zero offset in support")
        if not p > 0:
            failures.append(f"non-positive probability {p} for offset {offset}")

    if len(set(kernel.offsets)) != len(kernel.offsets):
        failures.append("duplicate offsets in support")

    total = sum(kernel.probabilities)
    if abs(total - 1.0) > PROBABILITY_TOLERANCE:
        failures.append(f"probabilities sum to {total!r}, not 1")

    index = None
    if not failures:
        index = lattice_index(kernel.offsets, kernel.dimension)
        if index == 0:
            failures.append("support does not span Z^d (rank deficient)")
        elif index != 1:
            failures.append(f"support generates a sublattice of index {index}")

    if failures:
        logger.debug(f"Kernel {kernel.kernel_id} failed validation: {failures}")
    return KernelDiagnostic(not failures, failures, index)


def require_valid(kernel: JumpKernel) -> JumpKernel:
    """Return ``kernel`` or raise KernelValidationError."""
    diagnostic = kernel_validate(kernel)
    if not diagnostic.ok:
        raise KernelValidationError(kernel.kernel_id, diagnostic.failures)
    return kernel


# ==================== Builtin kernels ====================

def nearest_neighbour(dimension: int) -> JumpKernel:
    """Symmetric nearest-neighbour walk: +-e_i with probability 1/(2d) each."""
    entries = []
    for axis in range(dimension):
        for sign in (1, -1):
            offset = [0] * dimension
            offset[axis] = sign
            entries.append((tuple(offset), 1.0 / (2 * dimension)))
    return JumpKernel(dimension, tuple(entries), f"nn-d{dimension}")


def biased(p_right: float) -> JumpKernel:
    """One-dimensional walk jumping +1 with probability ``p_right``, -1 otherwise."""
    if not 0.0 < p_right < 1.0:
        raise ValueError(f"p_right must lie in (0, 1), got {p_right}")
    return JumpKernel(1, (((1,), p_right), ((-1,), 1.0 - p_right)), f"biased-{p_right:g}")


def totally_asymmetric() -> JumpKernel:
    """One-dimensional walk always jumping +1."""
    return JumpKernel(1, (((1,), 1.0),), "tasep-d1")


def load_kernel_file(path: str) -> JumpKernel:
    """
    Load a kernel from YAML.

    Expected layout::

        id: my-kernel
        dimension: 1
        entries:
          - {offset: [1], p: 0.5}
          - {offset: [-1], p: 0.5}
    """
    with open(path, 'r') as f:
        data = yaml.safe_load(f)
    return kernel_from_dict(data, default_id=Path(path).stem)


def kernel_from_dict(data: Dict[str, Any], default_id: str = "custom") -> JumpKernel:
    """Build a kernel from its ``to_dict`` form."""
    try:
        entries = tuple((tuple(e['offset']), float(e['p'])) for e in data['entries'])
        dimension = int(data.get('dimension', len(entries[0][0]) if entries else 1))
    except (KeyError, TypeError, IndexError) as e:
        raise ValueError(f"Malformed kernel description: {e}")
    return JumpKernel(dimension, entries, str(data.get('id', default_id)))


def resolve_kernel(spec: str, dimension: int) -> JumpKernel:
    """
    Resolve a ``--kernel`` argument: a builtin name or a YAML file path.

    Builtins: ``nn``, ``biased:<p>``, ``tasep``.
    """
    if spec == "nn":
        kernel = nearest_neighbour(dimension)
    elif spec.startswith("biased"):
        _, _, value = spec.partition(":")
        kernel = biased(float(value) if value else 0.75)
    elif spec == "tasep":
        kernel = totally_asymmetric()
    elif Path(spec).exists():
        kernel = load_kernel_file(spec)
    else:
        raise ValueError(f"Unknown kernel '{spec}' (builtins: nn, biased:<p>, tasep, or a YAML file)")

    if kernel.dimension != dimension:
        raise ValueError(f"Kernel '{kernel.kernel_id}' has dimension {kernel.dimension}, "
                         f"domain has {dimension}")
    return require_valid(kernel)

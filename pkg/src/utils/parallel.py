"""
Replica fan-out.

Tasks are mapped in order, either in-process or on a process pool; results
come back in submission order so records merge deterministically.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, List, Sequence, TypeVar

from tqdm import tqdm

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def map_tasks(func: Callable[[T], R], tasks: Sequence[T], workers: int = 1,
              desc: str = "replicas", progress: bool = False) -> List[R]:
    """
    Apply ``func`` to every task, preserving order.

    Args:
        func: Module-level callable (picklable when workers > 1)
        tasks: Task descriptions
        workers: Worker processes; 1 runs in-process
        desc: Progress-bar label
        progress: Show a tqdm progress bar

    Returns:
        Results in the order of ``tasks``
    """
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    if workers == 1 or len(tasks) <= 1:
        return [func(t) for t in tqdm(tasks, desc=desc, disable=not progress)]

    logger.debug(f"Fanning out {len(tasks)} {desc} to {workers} workers")
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(tqdm(executor.map(func, tasks), total=len(tasks), desc=desc,
                         disable=not progress))

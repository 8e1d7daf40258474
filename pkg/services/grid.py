"""
Parameter Grid Service for FeketeLab.
Runs independent grid cells in a process pool and returns results in input order.
"""

import logging
import os
from concurrent.futures import ProcessPoolExecutor, as_completed
from typing import Callable, Iterable, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def resolve_workers(workers: int) -> int:
    """0 means one worker per CPU."""
    if workers < 0:
        raise ValueError(f"workers must be >= 0, got {workers}")
    return workers or (os.cpu_count() or 1)


def run_grid(func: Callable[[T], R], cells: Iterable[T], workers: int = 1) -> list[R]:
    """
    Apply `func` to every cell.

    Args:
        func: picklable top-level callable
        cells: grid parameters
        workers: process count (1 runs inline, 0 uses every CPU)

    Returns:
        Results in the order of `cells`, whatever order workers finish in
    """
    cells = list(cells)
    workers = resolve_workers(workers)
    if workers == 1 or len(cells) < 2:
        return [func(cell) for cell in cells]

    results: list = [None] * len(cells)
    with ProcessPoolExecutor(max_workers=min(workers, len(cells))) as executor:
        futures = {executor.submit(func, cell): index for index, cell in enumerate(cells)}
        for future in as_completed(futures):
            results[futures[future]] = future.result()
    logger.debug(f"Grid of {len(cells)} cells finished on {workers} workers")
    return results

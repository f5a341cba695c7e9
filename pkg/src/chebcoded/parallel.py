"""Order-preserving parallel map used by the subset sweeps.

Work items are always generated up front and results reduced in item
order, so thread count never changes any output.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

__all__ = ["parallel_map", "resolve_threads"]


def resolve_threads(threads: int) -> int:
    """0 means auto (one thread per CPU); negatives are invalid."""
    if threads < 0:
        raise ValueError(f"thread count must be >= 0, got {threads}")
    return threads if threads else (os.cpu_count() or 1)


def parallel_map(fn, items, threads: int = 1) -> list:
    threads = resolve_threads(threads)
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))

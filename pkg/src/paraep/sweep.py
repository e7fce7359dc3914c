"""Deterministic parallel fan-out for parameter sweeps.

Cell evaluations are pure, so they may run on any number of workers; results
are placed by index and never depend on scheduling.  ``PARA_EP_THREADS``
bounds the worker count (the compiled kernels release the GIL, so threads
give real parallelism when the extension is active).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

__all__ = ["worker_count", "parallel_map"]


def worker_count() -> int:
    env = os.environ.get("PARA_EP_THREADS")
    if env is not None:
        try:
            n = int(env)
        except ValueError:
            n = 1
        return max(1, n)
    return max(1, min(8, os.cpu_count() or 1))


def parallel_map(fn, items):
    """Map ``fn`` over ``items`` preserving order; exceptions propagate."""
    items = list(items)
    n = worker_count()
    if n == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))

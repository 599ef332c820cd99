"""Small shared helpers: output formatting and worker-count control."""

from __future__ import annotations

import multiprocessing
import os
from typing import Callable, Iterable, Sequence


def fmt17(x: float) -> str:
    """Format a float with 17 significant digits (round-trips float64)."""
    return format(float(x), ".17g")


def thread_count() -> int:
    """Worker cap from QACCESS_THREADS; defaults to 1 (serial)."""
    raw = os.environ.get("QACCESS_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def parallel_map(fn: Callable, items: Sequence) -> list:
    """Order-preserving map, fanned out over processes when allowed.

    Each item must be picklable and fn must be a module-level function.
    Results are deterministic regardless of the worker count because the
    per-item work is pure and Pool.map preserves input order.
    """
    workers = min(thread_count(), len(items)) if items else 1
    if workers <= 1:
        return [fn(it) for it in items]
    with multiprocessing.Pool(workers) as pool:
        return pool.map(fn, items)

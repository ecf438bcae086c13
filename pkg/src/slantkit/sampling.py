"""Seeded sampling helpers and the optional per-point thread pool.

Every random draw in the package flows through `rng_for`, keyed by the run
seed plus integer stream labels, so verdicts are reproducible and independent
of evaluation order. `SLANTKIT_THREADS` caps the pool used for per-point
work; the default of 1 keeps everything serial.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

DEFAULT_SEED = 53081

_MASK64 = (1 << 64) - 1


def rng_for(seed: int, *streams: int) -> np.random.Generator:
    """Deterministic generator for (seed, stream...) tuples."""
    key = [int(seed) & _MASK64] + [int(s) & _MASK64 for s in streams]
    return np.random.default_rng(key)


def thread_count() -> int:
    raw = os.environ.get("SLANTKIT_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def map_ordered(fn, items):
    """Apply fn over items, possibly on a thread pool, preserving order."""
    items = list(items)
    workers = thread_count()
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def box_points(n: int, mask: tuple[int, ...] | None, count: int, box=(-2.0, 2.0),
               seed: int = DEFAULT_SEED, stream: int = 7) -> list[np.ndarray]:
    """Seeded uniform points in the box, embedded through the mask.

    `mask` lists the 1-based ambient coordinates that belong to the
    submanifold; coordinates outside it stay zero. Without a mask the points
    fill the whole ambient space.
    """
    rng = rng_for(seed, stream)
    free = [i - 1 for i in mask] if mask else list(range(n))
    lo, hi = box
    out = []
    for _ in range(count):
        p = np.zeros(n)
        p[free] = rng.uniform(lo, hi, size=len(free))
        out.append(p)
    return out


def default_sample_points(n: int, mask: tuple[int, ...] | None, count: int = 16,
                          box=(-2.0, 2.0), seed: int = DEFAULT_SEED) -> list[np.ndarray]:
    """Origin, unit points along each in-mask axis, then seeded box points."""
    free = [i - 1 for i in mask] if mask else list(range(n))
    pts = [np.zeros(n)]
    for i in free:
        p = np.zeros(n)
        p[i] = 1.0
        pts.append(p)
    pts.extend(box_points(n, mask, count, box=box, seed=seed))
    return pts

"""Replicate fan-out with results merged in replicate order.

Each replicate draws from its own ``SeedSpec`` stream, so the merged output
does not depend on the number of worker threads or on completion order.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence

import numpy as np

from .paths import SeedSpec


def map_replicates(func: Callable[[SeedSpec], object], master_seed: int, indices: Sequence[int] | int,
                   threads: int = 1) -> list:
    """``[func(SeedSpec(master_seed, k)) for k in indices]`` on up to ``threads`` workers."""
    if isinstance(indices, int):
        indices = range(indices)
    seeds = [SeedSpec(master_seed, int(k)) for k in indices]
    if threads <= 1 or len(seeds) <= 1:
        return [func(s) for s in seeds]
    with ThreadPoolExecutor(max_workers=int(threads)) as pool:
        return list(pool.map(func, seeds))


def stable_mean(values) -> float:
    """Correctly rounded mean, independent of summation order."""
    v = np.asarray(values, dtype=float).ravel()
    return math.fsum(v) / v.size


def stable_mean_se(values) -> tuple[float, float]:
    """Mean and its standard error."""
    v = np.asarray(values, dtype=float).ravel()
    m = stable_mean(v)
    if v.size < 2:
        return m, float("nan")
    var = math.fsum((v - m) ** 2) / (v.size - 1)
    return m, math.sqrt(var / v.size)

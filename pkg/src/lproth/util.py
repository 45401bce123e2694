"""Small numeric helpers shared across the package."""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np


def compensated_sum(values: Iterable[float]) -> float:
    """Order-robust sum of floats (exact up to one final rounding).

    Wraps math.fsum so that parallel partitions merged in any order agree
    to well below 1e-12 relative.
    """
    return math.fsum(values)


def neumaier_sum(values: np.ndarray) -> float:
    """Kahan-Neumaier running sum for arrays, usable in chunked reductions."""
    s = 0.0
    c = 0.0
    for v in np.asarray(values, dtype=float).ravel():
        t = s + v
        if abs(s) >= abs(v):
            c += (s - t) + v
        else:
            c += (v - t) + s
        s = t
    return s + c


def spawn_rng(master_seed: int, task_index: int) -> np.random.Generator:
    """Derive an independent, reproducible stream from (master seed, task index).

    Parallel and serial execution orders see identical streams.
    """
    return np.random.default_rng(np.random.SeedSequence(entropy=master_seed, spawn_key=(task_index,)))


def worker_count() -> int:
    """Worker cap from LPROTH_THREADS; execution is serial-deterministic either way."""
    import os

    try:
        return max(1, int(os.environ.get("LPROTH_THREADS", "1")))
    except ValueError:
        return 1

"""Chunked Monte Carlo driver.

A sample of size n is cut into chunks of ``CHUNK_SIZE``; chunk c draws from
``rng.child(Var.CHUNK, c)``. The partition depends on n alone, so results are
identical for every thread count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence, TypeVar

import numpy as np

from .errors import ConfigurationError
from .rng import RngStream, Var

CHUNK_SIZE = 1 << 16
THREADS_ENV = "EXCURSION_THREADS"

T = TypeVar("T")


def default_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "").strip()
    if not raw:
        return 1
    try:
        k = int(raw)
    except ValueError:
        raise ConfigurationError(f"{THREADS_ENV}={raw!r} is not an integer") from None
    return max(k, 1)


def chunk_sizes(n: int, chunk: int = CHUNK_SIZE) -> list[int]:
    full, rest = divmod(int(n), chunk)
    return [chunk] * full + ([rest] if rest else [])


def map_chunks(
    fn: Callable[[RngStream, int], T],
    n: int,
    rng: RngStream,
    threads: int | None = None,
    chunk: int = CHUNK_SIZE,
) -> list[T]:
    """Apply ``fn(chunk_rng, size)`` to each chunk; results in chunk order."""
    sizes = chunk_sizes(n, chunk)
    streams = [rng.child(Var.CHUNK, c) for c in range(len(sizes))]
    threads = default_threads() if threads is None else max(int(threads), 1)
    if threads == 1 or len(sizes) == 1:
        return [fn(s, m) for s, m in zip(streams, sizes)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, streams, sizes))


@dataclass(frozen=True)
class Moments:
    """Count, mean and centered sum of squares; merges exactly (Chan et al.)."""

    count: int
    mean: float
    m2: float

    @classmethod
    def of(cls, x) -> "Moments":
        x = np.asarray(x, dtype=float)
        if x.size == 0:
            return cls(0, 0.0, 0.0)
        mu = float(x.mean())
        return cls(int(x.size), mu, float(np.sum((x - mu) ** 2)))

    def merge(self, other: "Moments") -> "Moments":
        if other.count == 0:
            return self
        if self.count == 0:
            return other
        n = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * other.count / n
        m2 = self.m2 + other.m2 + delta * delta * self.count * other.count / n
        return Moments(n, mean, m2)

    @staticmethod
    def combine(parts: Sequence["Moments"]) -> "Moments":
        acc = Moments(0, 0.0, 0.0)
        for p in parts:
            acc = acc.merge(p)
        return acc

    @property
    def variance(self) -> float:
        return self.m2 / (self.count - 1) if self.count > 1 else 0.0

    @property
    def std_error(self) -> float:
        return float(np.sqrt(self.variance / self.count)) if self.count > 0 else 0.0

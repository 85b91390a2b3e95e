"""Random walks, their Lindley process, and the highest complete excursion."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from ._mc import map_chunks
from .errors import DomainError
from .rng import RngStream, Var

__all__ = [
    "StepDistribution",
    "LindleyPath",
    "ExcursionRecord",
    "NormalizedBatch",
    "lindley_path",
    "excursion_stats",
    "normalize",
    "batch_simulate",
]

# paths per chunk in batch_simulate
PATH_CHUNK = 256


class StepDistribution(enum.Enum):
    """Centered unit-variance step laws."""

    RADEMACHER = "rademacher"
    GAUSSIAN = "gaussian"
    UNIFORM_CENTERED = "uniform"

    def sample(self, rng: RngStream, shape) -> np.ndarray:
        if self is StepDistribution.RADEMACHER:
            return 2.0 * rng.integers(0, 2, size=shape).astype(float) - 1.0
        if self is StepDistribution.GAUSSIAN:
            return rng.normal(shape)
        return math.sqrt(3.0) * (2.0 * rng.uniform(shape) - 1.0)


@dataclass(frozen=True)
class LindleyPath:
    steps: np.ndarray  # eps_1..eps_n
    u: np.ndarray  # U_0..U_n, U_0 = 0


@dataclass(frozen=True)
class ExcursionRecord:
    g_n: int
    ustar: float
    fstar: int
    gstar: int
    dstar: int
    thetastar: int
    degenerate: bool


@dataclass(frozen=True)
class NormalizedBatch:
    """Normalized (U*_n / sqrt(n), theta*_n / n) for ``reps`` independent paths."""

    n: int
    ustar: np.ndarray
    theta: np.ndarray
    degenerate: np.ndarray

    def __len__(self):
        return self.ustar.shape[0]

    @property
    def degenerate_fraction(self) -> float:
        return float(self.degenerate.mean()) if len(self) else 0.0


def lindley_path(steps) -> LindleyPath:
    """U_0 = 0, U_{k+1} = max(U_k + eps_{k+1}, 0)."""
    steps = np.ascontiguousarray(steps, dtype=float)
    if steps.ndim != 1:
        raise DomainError("steps must be one-dimensional")
    if not np.all(np.isfinite(steps)):
        raise DomainError("steps must be finite")
    u = kernels.lindley(steps[None, :])[0]
    return LindleyPath(steps, u)


def _records(u: np.ndarray):
    g_n, ustar, fstar, gstar, dstar = kernels.excursions(np.ascontiguousarray(u))
    return g_n, ustar, fstar, gstar, dstar


def excursion_stats(path: LindleyPath) -> ExcursionRecord:
    """Highest complete excursion of the path up to its last zero g_n.

    U*_n is the maximum of U over [0, g_n] and f*_n the last index where it
    is attained; g*_n and d*_n are the zeros around f*_n. If the path never
    leaves 0 before g_n the record is degenerate with f = g = d = g_n.
    """
    u = np.asarray(path.u, dtype=float)
    if u.size == 0:
        raise DomainError("path is empty")
    g_n, ustar, fstar, gstar, dstar = _records(u[None, :])
    s = float(ustar[0])
    return ExcursionRecord(
        g_n=int(g_n[0]),
        ustar=s,
        fstar=int(fstar[0]),
        gstar=int(gstar[0]),
        dstar=int(dstar[0]),
        thetastar=int(fstar[0] - gstar[0]),
        degenerate=s == 0.0,
    )


def normalize(record: ExcursionRecord, m: int) -> tuple[float, float]:
    """(U*_m / sqrt(m), theta*_m / m) for a record from a path of length m."""
    m = int(m)
    if m <= 0:
        raise DomainError(f"m must be positive, got {m}")
    return record.ustar / math.sqrt(m), record.thetastar / m


def batch_simulate(
    dist: StepDistribution,
    n: int,
    reps: int,
    rng: RngStream,
    threads: int | None = None,
) -> NormalizedBatch:
    """Simulate ``reps`` walks of length ``n`` and normalize their records.

    Degenerate paths stay in the batch as (0, 0) and are flagged.
    """
    dist = StepDistribution(dist)
    n = int(n)
    reps = int(reps)
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if reps < 1:
        raise DomainError(f"reps must be >= 1, got {reps}")

    def work(r, m):
        steps = dist.sample(r.child(Var.STEPS), (m, n))
        u = kernels.lindley(steps)
        _, ustar, fstar, gstar, _ = _records(u)
        return ustar, fstar - gstar

    parts = map_chunks(work, reps, rng.split(), threads, chunk=PATH_CHUNK)
    ustar = np.concatenate([p[0] for p in parts])
    theta = np.concatenate([p[1] for p in parts])
    return NormalizedBatch(n, ustar / math.sqrt(n), theta / n, ustar == 0.0)

"""Samplers for xi, alpha_1, g(1), lambda(x) and the weighted pair (u, theta).

Every sampler takes an :class:`~excursion.rng.RngStream`, advances it by one
``split`` and derives all further randomness from the split-off stream, one
child per named variable (see :class:`~excursion.rng.Var`). Large requests
are cut into fixed chunks, so output does not depend on ``threads``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate
from scipy.special import gammainc

from . import kernels
from ._mc import map_chunks
from .errors import ConfigurationError, DomainError
from .rng import RngStream, Var

__all__ = [
    "LambdaTruncation",
    "WeightedSample",
    "WeightedSamples",
    "sample_xi",
    "sample_alpha1",
    "sample_arcsine_g1",
    "sample_lambda",
    "sample_joint_weighted",
    "expected_tail",
    "pairs_needed",
    "pairs_uniform",
]


@dataclass(frozen=True)
class LambdaTruncation:
    """How many pairs of the lambda(x) series to keep.

    K is the smallest count whose expected dropped tail is below
    ``tail_tol``. With ``compensate`` the dropped tail is replaced by its
    conditional mean given the last retained exponential sum, which keeps
    E[lambda(x)] exact for every K.
    """

    tail_tol: float = 0.02
    max_pairs: int = 4096
    compensate: bool = True

    def __post_init__(self):
        if not self.tail_tol > 0.0:
            raise ConfigurationError(f"tail_tol must be positive, got {self.tail_tol}")
        if self.max_pairs < 1:
            raise ConfigurationError(f"max_pairs must be positive, got {self.max_pairs}")


DEFAULT_TRUNCATION = LambdaTruncation()


@dataclass(frozen=True)
class WeightedSample:
    u: float
    theta: float
    weight: float


@dataclass(frozen=True)
class WeightedSamples:
    """Column arrays of weighted draws for one horizon ``t``."""

    u: np.ndarray
    theta: np.ndarray
    weight: np.ndarray
    t: float

    def __len__(self):
        return self.u.shape[0]

    def __getitem__(self, i) -> WeightedSample:
        return WeightedSample(float(self.u[i]), float(self.theta[i]), float(self.weight[i]))


def _run(draw, size, rng: RngStream, threads):
    base = rng.split()
    if size is None:
        out = draw(base, 1)
        if isinstance(out, tuple):
            return tuple(float(a[0]) for a in out)
        return float(out[0])
    size = int(size)
    if size < 0:
        raise DomainError(f"size must be nonnegative, got {size}")
    if size == 0:
        # empty draw keeps the column structure
        return draw(base.child(Var.CHUNK, 0), 0)
    parts = map_chunks(draw, size, base, threads)
    if isinstance(parts[0], tuple):
        return tuple(np.concatenate(cols) for cols in zip(*parts))
    return np.concatenate(parts)


def _xi_block(rng: RngStream, m: int) -> np.ndarray:
    return kernels.xi_quantile(rng.uniform(m))


def sample_xi(rng: RngStream, size: int | None = None, threads: int | None = None):
    """Draws of xi = T_1(BES(3)) by inverting its CDF."""
    return _run(_xi_block, size, rng, threads)


def sample_alpha1(rng: RngStream, size: int | None = None, threads: int | None = None):
    """Draws with density (2/pi) / sqrt(1 - s^2) on (0, 1)."""
    return _run(lambda r, m: np.sin(0.5 * math.pi * r.uniform(m)), size, rng, threads)


def sample_arcsine_g1(rng: RngStream, size: int | None = None, threads: int | None = None):
    """Draws of g(1), the last zero of Brownian motion before 1 (arcsine law)."""
    return _run(lambda r, m: np.sin(0.5 * math.pi * r.uniform(m)) ** 2, size, rng, threads)


# -- lambda(x) ------------------------------------------------------------------------


def expected_tail(x: float, pairs: int) -> float:
    """(2/3) sum_{k>K} E[(1/x + Gamma_k)^-2] for K = ``pairs``.

    Summing the Gamma_k densities over k > K gives P(Poisson(y) >= K), the
    regularized lower incomplete gamma function, hence the single integral
    (2/3) int_0^inf P(K, y) / (1/x + y)^2 dy.
    """
    x = float(x)
    if pairs == 0:
        return 2.0 / 3.0 * x
    c = 1.0 / x
    f = lambda y: gammainc(pairs, y) / (c + y) ** 2
    # P(K, y) rises from 0 to 1 around y = K
    lo, hi = max(pairs - 8.0 * math.sqrt(pairs), 0.0), pairs + 8.0 * math.sqrt(pairs) + 8.0
    body = integrate.quad(f, 0.0, lo, limit=200)[0] if lo > 0.0 else 0.0
    body += integrate.quad(f, lo, hi, limit=200)[0]
    body += integrate.quad(f, hi, math.inf, limit=200)[0]
    return 2.0 / 3.0 * body


def pairs_uniform(trunc: LambdaTruncation = DEFAULT_TRUNCATION) -> int:
    """A pair count meeting ``tail_tol`` for every x > 0.

    Uses expected_tail(x, K) <= (2/3) E[1/Gamma_K] = (2/3) / (K - 1).
    """
    k = max(2, math.ceil(1.0 + (2.0 / 3.0) / trunc.tail_tol))
    if k > trunc.max_pairs:
        raise ConfigurationError(f"tail_tol={trunc.tail_tol} needs {k} pairs > max_pairs={trunc.max_pairs}")
    return k


@lru_cache(maxsize=256)
def _pairs_needed(x: float, tol: float, max_pairs: int) -> int:
    lo, hi = 0, max(2, math.ceil(1.0 + (2.0 / 3.0) / tol))
    if expected_tail(x, 0) < tol:
        return 0
    # expected_tail is decreasing in K; hi already satisfies the bound
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if expected_tail(x, mid) < tol:
            hi = mid
        else:
            lo = mid
    if hi > max_pairs:
        raise ConfigurationError(f"lambda({x}) needs {hi} pairs for tail_tol={tol} > max_pairs={max_pairs}")
    return hi


def pairs_needed(x: float, trunc: LambdaTruncation = DEFAULT_TRUNCATION) -> int:
    """Smallest K with expected_tail(x, K) < tail_tol."""
    x = float(x)
    if not x > 0.0:
        raise DomainError(f"x must be positive, got {x}")
    return _pairs_needed(x, trunc.tail_tol, trunc.max_pairs)


def _lambda_block(x: np.ndarray, pairs: int, rng: RngStream, compensate: bool) -> np.ndarray:
    m = x.shape[0]
    xi = np.empty((m, 2 * pairs + 2))
    for j in range(2 * pairs + 2):
        xi[:, j] = kernels.xi_quantile(rng.child(Var.LAMBDA_XI, j).uniform(m))
    exps = np.empty((m, pairs + 1))
    for j in range(pairs + 1):
        exps[:, j] = rng.child(Var.LAMBDA_EXP, j).exponential(m)
    gam = np.cumsum(exps, axis=1)
    return kernels.lambda_sum(x, xi, gam, compensate)


def sample_lambda(
    x: float,
    rng: RngStream,
    size: int | None = None,
    trunc: LambdaTruncation = DEFAULT_TRUNCATION,
    threads: int | None = None,
    pairs: int | None = None,
):
    """Draws of lambda(x) = x^2 (xi_1 + xi_2) + sum_k (xi_2k+1 + xi_2k+2) / (1/x + Gamma_k)^2.

    ``pairs`` overrides the truncation rule. Column j of the series always
    comes from the same child stream, so runs with different K share their
    leading terms.
    """
    x = float(x)
    if not x > 0.0:
        raise DomainError(f"x must be positive, got {x}")
    k = pairs_needed(x, trunc) if pairs is None else int(pairs)
    if k > trunc.max_pairs:
        raise ConfigurationError(f"{k} pairs > max_pairs={trunc.max_pairs}")

    def draw(r, m):
        return _lambda_block(np.full(m, x), k, r, trunc.compensate)

    return _run(draw, size, rng, threads)


# -- weighted representation ------------------------------------------------------------


def _joint_block(t: float, pairs: int, compensate: bool, rng: RngStream, m: int):
    xi = kernels.xi_quantile(rng.child(Var.XI).uniform(m))
    xi_p = kernels.xi_quantile(rng.child(Var.XI_PRIME).uniform(m))
    e0 = rng.child(Var.E0_PRIME).exponential(m)
    a1 = np.sin(0.5 * math.pi * rng.child(Var.ALPHA1).uniform(m))
    a2 = rng.child(Var.ALPHA2).uniform(m)
    lam = _lambda_block(1.0 / e0, pairs, rng, compensate)
    z = xi + xi_p + (e0 * a2) ** 2 * lam
    root_z = np.sqrt(z)
    u = a1 * math.sqrt(t) / root_z
    theta = t * a1 * a1 * xi / z
    w = math.sqrt(math.pi / 2.0) * a2 * e0 * e0 / root_z
    return u, theta, w


def sample_joint_weighted(
    t: float,
    rng: RngStream,
    size: int | None = None,
    trunc: LambdaTruncation = DEFAULT_TRUNCATION,
    threads: int | None = None,
):
    """Weighted draws with E[f(U*(t), theta*(t))] = E[w f(u, theta)].

    With Z = xi + xi' + (e0' alpha_2)^2 lambda(1/e0'):
    u = alpha_1 sqrt(t / Z), theta = t alpha_1^2 xi / Z and
    w = sqrt(pi/2) alpha_2 e0'^2 / sqrt(Z). lambda is truncated with a pair
    count valid uniformly in its argument.
    """
    t = float(t)
    if not t > 0.0:
        raise DomainError(f"t must be positive, got {t}")
    k = pairs_uniform(trunc)
    out = _run(lambda r, m: _joint_block(t, k, trunc.compensate, r, m), size, rng, threads)
    if size is None:
        return WeightedSample(*out)
    return WeightedSamples(*out, t=t)

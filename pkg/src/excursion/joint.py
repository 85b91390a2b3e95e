"""Expectations, rectangle probabilities and the joint density of (U*(t), theta*(t))."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import kernels
from ._mc import Moments, map_chunks
from .errors import DomainError
from .rng import RngStream, Var
from .samplers import (
    DEFAULT_TRUNCATION,
    LambdaTruncation,
    WeightedSample,
    _joint_block,
    _lambda_block,
    pairs_uniform,
)
from .series import DEFAULT_POLICY, SeriesPolicy, xi_density

__all__ = [
    "MonteCarloEstimate",
    "WeightedSample",
    "estimate_expectation",
    "estimate_many",
    "rect_prob",
    "rect_probs",
    "joint_density",
    "joint_density_grid",
    "density_integral",
    "scale_to_unit",
    "unscale",
    "density_jacobian",
]


@dataclass(frozen=True)
class MonteCarloEstimate:
    mean: float
    std_error: float
    n_samples: int
    seed: int

    @classmethod
    def from_moments(cls, m: Moments, seed: int, scale: float = 1.0) -> "MonteCarloEstimate":
        return cls(scale * m.mean, abs(scale) * m.std_error, m.count, seed)


def _check_t(t: float) -> float:
    t = float(t)
    if not t > 0.0:
        raise DomainError(f"t must be positive, got {t}")
    return t


def _check_n(n: int) -> int:
    n = int(n)
    if n < 2:
        raise DomainError(f"n must be at least 2, got {n}")
    return n


def estimate_many(
    fs: Sequence[Callable[[np.ndarray, np.ndarray], np.ndarray]],
    t: float,
    n: int,
    rng: RngStream,
    trunc: LambdaTruncation = DEFAULT_TRUNCATION,
    threads: int | None = None,
) -> list[MonteCarloEstimate]:
    """Estimate E[f(U*(t), theta*(t))] for several ``f`` on one weighted sample."""
    t = _check_t(t)
    n = _check_n(n)
    k = pairs_uniform(trunc)
    base = rng.split()

    def work(r, m):
        u, theta, w = _joint_block(t, k, trunc.compensate, r, m)
        return [Moments.of(np.asarray(f(u, theta), dtype=float) * w) for f in fs]

    parts = map_chunks(work, n, base, threads)
    return [MonteCarloEstimate.from_moments(Moments.combine([p[i] for p in parts]), rng.seed) for i in range(len(fs))]


def estimate_expectation(
    f: Callable[[np.ndarray, np.ndarray], np.ndarray],
    t: float,
    n: int,
    rng: RngStream,
    trunc: LambdaTruncation = DEFAULT_TRUNCATION,
    threads: int | None = None,
) -> MonteCarloEstimate:
    """Weighted Monte Carlo estimate of E[f(U*(t), theta*(t))].

    ``f`` takes arrays (u, theta) and must be vectorized and bounded.
    """
    return estimate_many([f], t, n, rng, trunc, threads)[0]


def _rect_indicator(a: float, b: float, t: float):
    a = float(a)
    b = float(b)
    if not a > 0.0:
        raise DomainError(f"a must be positive, got {a}")
    if not 0.0 < b <= t:
        raise DomainError(f"b must lie in (0, t] = (0, {t}], got {b}")
    return lambda u, theta: (u <= a) & (theta <= b)


def rect_probs(
    rects: Sequence[tuple[float, float]],
    t: float,
    n: int,
    rng: RngStream,
    trunc: LambdaTruncation = DEFAULT_TRUNCATION,
    threads: int | None = None,
) -> list[MonteCarloEstimate]:
    """P(U*(t) <= a, theta*(t) <= b) for each (a, b), from common draws."""
    t = _check_t(t)
    return estimate_many([_rect_indicator(a, b, t) for a, b in rects], t, n, rng, trunc, threads)


def rect_prob(
    a: float,
    b: float,
    t: float,
    n: int,
    rng: RngStream,
    trunc: LambdaTruncation = DEFAULT_TRUNCATION,
    threads: int | None = None,
) -> MonteCarloEstimate:
    """P(U*(t) <= a, theta*(t) <= b); ``a`` may be ``inf``."""
    return rect_probs([(a, b)], t, n, rng, trunc, threads)[0]


# -- joint density ------------------------------------------------------------------------


@dataclass(frozen=True)
class _RhoDraws:
    u: np.ndarray  # xi draws
    e: np.ndarray  # 1 / v, v = 1/e has law exp(-1/v) v^-2 dv
    lam: np.ndarray  # lambda(v)


def _rho_block(k: int, compensate: bool, rng: RngStream, m: int):
    u = kernels.xi_quantile(rng.child(Var.RHO_XI).uniform(m))
    e = rng.child(Var.RHO_EXP).exponential(m)
    lam = _lambda_block(1.0 / e, k, rng, compensate)
    return u, e, lam


def _rho_draws(n, rng, trunc, threads) -> _RhoDraws:
    k = pairs_uniform(trunc)
    parts = map_chunks(lambda r, m: _rho_block(k, trunc.compensate, r, m), n, rng.split(), threads)
    return _RhoDraws(*(np.concatenate(c) for c in zip(*parts)))


def _rho_summand(x: float, y: float, t: float, d: _RhoDraws) -> np.ndarray:
    rho1 = t - y - x * x * d.u
    inner = rho1 - x * x * d.lam * d.e * d.e
    return (np.sqrt(np.maximum(rho1, 0.0)) - np.sqrt(np.maximum(inner, 0.0))) / d.lam


def _density_prefactor(x: float, y: float, policy: SeriesPolicy) -> float:
    return math.sqrt(2.0 / math.pi) * xi_density(y / (x * x), policy).value / x**4


def joint_density(
    x: float,
    y: float,
    t: float,
    n: int,
    rng: RngStream,
    trunc: LambdaTruncation = DEFAULT_TRUNCATION,
    policy: SeriesPolicy = DEFAULT_POLICY,
    threads: int | None = None,
) -> MonteCarloEstimate:
    """Density of (U*(t), theta*(t)) at (x, y).

    Equals sqrt(2/pi) rho(x, y) p_xi(y / x^2) / x^4 where rho is the mean of
    (1/lambda(v)) (sqrt(rho1+) - sqrt((rho1 - x^2 lambda(v) / v^2)+)),
    rho1 = t - y - x^2 u, over u ~ xi, v = 1/e with e unit exponential.
    Zero outside 0 < y < t.
    """
    return joint_density_grid([x], [y], t, n, rng, trunc, policy, threads)[0][0]


def joint_density_grid(
    xs: Sequence[float],
    ys: Sequence[float],
    t: float,
    n: int,
    rng: RngStream,
    trunc: LambdaTruncation = DEFAULT_TRUNCATION,
    policy: SeriesPolicy = DEFAULT_POLICY,
    threads: int | None = None,
) -> list[list[MonteCarloEstimate]]:
    """joint_density on the grid xs x ys, all points sharing one set of draws.

    Common draws make the surface smooth, which is what quadrature over it
    needs; each point's standard error is still the one-point error.
    """
    t = _check_t(t)
    n = _check_n(n)
    xs = [float(x) for x in xs]
    ys = [float(y) for y in ys]
    for x in xs:
        if not x > 0.0:
            raise DomainError(f"x must be positive, got {x}")
    draws = None
    out = []
    for x in xs:
        row = []
        for y in ys:
            if not 0.0 < y < t:
                row.append(MonteCarloEstimate(0.0, 0.0, n, rng.seed))
                continue
            if draws is None:
                draws = _rho_draws(n, rng, trunc, threads)
            m = Moments.of(_rho_summand(x, y, t, draws))
            row.append(MonteCarloEstimate.from_moments(m, rng.seed, _density_prefactor(x, y, policy)))
        out.append(row)
    return out


def density_integral(
    points: Sequence[tuple[float, float]],
    weights: Sequence[float],
    t: float,
    n: int,
    rng: RngStream,
    trunc: LambdaTruncation = DEFAULT_TRUNCATION,
    policy: SeriesPolicy = DEFAULT_POLICY,
    threads: int | None = None,
) -> MonteCarloEstimate:
    """Quadrature sum of joint_density over ``points`` with ``weights``.

    The rule is applied to each draw before averaging, so the standard error
    accounts for the correlation between nodes that share draws.
    """
    t = _check_t(t)
    n = _check_n(n)
    if len(points) != len(weights):
        raise DomainError("points and weights differ in length")
    draws = _rho_draws(n, rng, trunc, threads)
    acc = np.zeros(n)
    for (x, y), wq in zip(points, weights):
        x, y = float(x), float(y)
        if not x > 0.0:
            raise DomainError(f"x must be positive, got {x}")
        if 0.0 < y < t:
            acc += (float(wq) * _density_prefactor(x, y, policy)) * _rho_summand(x, y, t, draws)
    return MonteCarloEstimate.from_moments(Moments.of(acc), rng.seed)


# -- scaling ------------------------------------------------------------------------------


def scale_to_unit(x: float, y: float, t: float) -> tuple[float, float]:
    """Map a point of the horizon-t law to the horizon-1 law: (x / sqrt(t), y / t)."""
    t = _check_t(t)
    return x / math.sqrt(t), y / t


def unscale(x1: float, y1: float, t: float) -> tuple[float, float]:
    """Inverse of :func:`scale_to_unit`."""
    t = _check_t(t)
    return x1 * math.sqrt(t), y1 * t


def density_jacobian(t: float) -> float:
    """t^(3/2): p_t(x, y) = p_1(x / sqrt(t), y / t) / density_jacobian(t)."""
    return _check_t(t) ** 1.5

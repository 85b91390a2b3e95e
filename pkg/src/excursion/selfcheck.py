"""Fast cross-checks between independent computations of the same quantity.

Each check returns a :class:`Check`; :func:`run_all` runs them in a fixed
order. Monte Carlo checks use fixed streams, so the outcome is deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

from . import series as S
from .joint import estimate_expectation
from .lindley import excursion_stats, lindley_path
from .rng import RngStream
from .samplers import sample_xi


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    detail: str


def _xi_dual(policy) -> Check:
    u = np.geomspace(0.02, 50.0, 200)
    worst = max(abs(S.xi_density_images(x, policy).value - S.xi_density_spectral(x, policy).value) for x in u)
    return Check("xi_dual_series", worst <= 1e-10, f"max_abs_diff={worst:.3e}")


def _ustar_routes(policy) -> Check:
    worst = 0.0
    for x in (0.2, 0.5, 0.9, 1.4):
        for t in (0.5, 1.0, 2.0):
            vals = [S.ustar_survival(x, t, policy, r).value for r in S.Route]
            worst = max(worst, max(vals) - min(vals))
    return Check("ustar_routes", worst <= 1e-4, f"max_spread={worst:.3e}")


def _normalizations(policy) -> Check:
    masses = {
        "xi": integrate.quad(lambda u: S.xi_density(u, policy).value, 0.0, math.inf, limit=200)[0],
        "ustar": integrate.quad(lambda x: S.ustar_density(x, 1.0, policy).value, 0.0, math.inf, limit=200)[0],
        "theta": integrate.quad(lambda x: S.thetastar_density(x, 1.0, policy).value, 0.0, 1.0, limit=200)[0],
        "arcsine": integrate.quad(S.arcsine_density, 0.0, 1.0, limit=200)[0],
        "tbhat": integrate.quad(lambda s: S.tbhat_density(1.0, s), 0.0, math.inf, limit=200)[0],
    }
    worst = max(abs(m - 1.0) for m in masses.values())
    return Check("normalizations", worst <= 1e-6, " ".join(f"{k}={v:.9f}" for k, v in masses.items()))


def _xi_expect(g: Callable[[float], float], lo: float, hi: float, policy) -> float:
    return integrate.quad(lambda u: g(u) * S.xi_density(u, policy).value, lo, hi, limit=400, epsabs=1e-12)[0]


def _kernels(policy) -> Check:
    worst = 0.0
    for a, b in ((1.0, 1.0), (2.0, 4.0), (0.5, 0.3)):
        h = S.h_kernel(a, b, policy).value
        # (b - a u)^(-1/2) singular at u = b/a: substitute u = (b/a)(1 - s^2)
        q = integrate.quad(lambda s: 2.0 * math.sqrt(b) / a * S.xi_density(b / a * (1 - s * s), policy).value, 0.0, 1.0, limit=200)[0]
        worst = max(worst, abs(h - q))
    for a, b, c in ((1.0, 0.5, 0.5), (2.0, 0.2, 1.0)):
        hh = S.hhat_kernel(a, b, c, policy).value
        q = _xi_expect(lambda u: (a * u - b) ** -1.5 * math.exp(-c / (a * u - b)), b / a, math.inf, policy)
        worst = max(worst, abs(hh - q))
    return Check("h_kernels", worst <= 1e-6, f"max_abs_diff={worst:.3e}")


def _xi_mean(seed: int) -> Check:
    x = sample_xi(RngStream(seed, 101), 200_000)
    se = x.std(ddof=1) / math.sqrt(x.size)
    z = (x.mean() - 1.0 / 3.0) / se
    return Check("xi_mean", bool(abs(z) <= 3.0), f"mean={x.mean():.6f} z={z:.2f}")


def _weight_mass(seed: int) -> Check:
    est = estimate_expectation(lambda u, th: np.ones_like(u), 1.0, 100_000, RngStream(seed, 102))
    z = (est.mean - 1.0) / est.std_error
    return Check("weight_mass", bool(abs(z) <= 3.0), f"mean={est.mean:.5f} se={est.std_error:.5f}")


def _brute_record(u):
    zeros = [k for k, v in enumerate(u) if v == 0.0]
    g = zeros[-1]
    best = max(u[: g + 1])
    if best == 0.0:
        return g, 0.0, g, g, g
    f = max(k for k in range(g + 1) if u[k] == best)
    gs = max(k for k in zeros if k <= f)
    d = min(k for k in zeros if k >= f)
    return g, best, f, gs, d


def _lindley(seed: int) -> Check:
    rng = RngStream(seed, 103)
    bad = 0
    for _ in range(100):
        steps = 2.0 * rng.integers(0, 2, 64) - 1.0
        p = lindley_path(steps)
        s = np.concatenate([[0.0], np.cumsum(steps)])
        if not np.array_equal(p.u, s - np.minimum.accumulate(s)):
            bad += 1
            continue
        r = excursion_stats(p)
        if (r.g_n, r.ustar, r.fstar, r.gstar, r.dstar) != _brute_record(list(p.u)):
            bad += 1
    return Check("lindley_bruteforce", bad == 0, f"mismatches={bad}/100")


def run_all(policy: S.SeriesPolicy = S.DEFAULT_POLICY, seed: int = 1) -> list[Check]:
    checks = [
        lambda: _xi_dual(policy),
        lambda: _ustar_routes(policy),
        lambda: _normalizations(policy),
        lambda: _kernels(policy),
        lambda: _xi_mean(seed),
        lambda: _weight_mass(seed),
        lambda: _lindley(seed),
    ]
    return [c() for c in checks]

"""Quantile tables that seed the Newton solve for the xi inverse CDF.

Nodes are uniform in s = -log(v) (lower half) and s = -log(1 - v) (upper
half). Neighbouring nodes bracket the root exactly because F is monotone.
"""

import numpy as np

from . import _numpy

S_LO = float(np.log(2.0))
S_HI = 38.5
N_NODES = 1024
# |log F(u) - log v| at which Newton stops; implies |F(u) - v| <= 1e-14 v
LOG_RESID_TOL = 1e-14
S_STEP = (S_HI - S_LO) / (N_NODES - 1)


def _bisect(fn, targets, lo, hi, iters=200):
    lo = np.full_like(targets, lo)
    hi = np.full_like(targets, hi)
    for _ in range(iters):
        mid = np.sqrt(lo * hi)
        # fn decreasing in the variable for both halves after the sign flip below
        below = fn(mid) > targets
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return np.sqrt(lo * hi)


def _build():
    s = S_LO + S_STEP * np.arange(N_NODES)
    # lower half: -log F(u) = s, decreasing in u
    lower = _bisect(lambda u: -np.log(np.maximum(_numpy.xi_cdf(u), 1e-300)), s, 1e-3, 50.0)
    # upper half: -log(1 - F(u)) = s, increasing in u, so negate both sides
    upper = _bisect(lambda u: np.log(np.maximum(_numpy.xi_sf(u), 1e-300)), -s, 1e-3, 50.0)
    return lower, upper


LOWER_U, UPPER_U = _build()

"""Vectorized numpy kernels. Same signatures and semantics as ``_numba``."""

import math

import numpy as np
from scipy.special import erfc

from ._constants import (
    ERFC_COEFFS,
    ERFC_SMALL_Y,
    SMALL_H,
    SMALL_H_COEFFS,
    U_CROSS,
    XI_IMAGE_TERMS,
    XI_SPECTRAL_TERMS,
)

_PI = np.pi
_IMG = (2.0 * np.arange(XI_IMAGE_TERMS) + 1.0) ** 2
_SPEC_K = np.arange(XI_SPECTRAL_TERMS, 0, -1, dtype=float)
_SPEC_SIGN = np.where(_SPEC_K % 2 == 1, 1.0, -1.0)


def _split(u):
    u = np.asarray(u, dtype=float)
    small = (u > 0.0) & (u < U_CROSS)
    large = u >= U_CROSS
    return u, small, large


def _cdf_images(us):
    return 4.0 / np.sqrt(2.0 * _PI * us) * np.exp(-_IMG / (2.0 * us[:, None])).sum(axis=1)


def _sf_spectral(ul):
    return 2.0 * (_SPEC_SIGN * np.exp(-_SPEC_K**2 * _PI**2 * ul[:, None] / 2.0)).sum(axis=1)


def xi_pdf(u):
    u, small, large = _split(u)
    out = np.zeros_like(u)
    us = u[small][:, None]
    out[small] = 2.0 * ((_IMG / us - 1.0) * np.exp(-_IMG / (2.0 * us))).sum(axis=1) / (
        np.sqrt(2.0 * _PI) * u[small] ** 1.5
    )
    ul = u[large][:, None]
    out[large] = _PI**2 * (_SPEC_SIGN * _SPEC_K**2 * np.exp(-_SPEC_K**2 * _PI**2 * ul / 2.0)).sum(axis=1)
    return out


def xi_cdf(u):
    u, small, large = _split(u)
    out = np.zeros_like(u)
    out[small] = _cdf_images(u[small])
    out[large] = 1.0 - _sf_spectral(u[large])
    return out


def xi_sf(u):
    u, small, large = _split(u)
    out = np.ones_like(u)
    out[small] = 1.0 - _cdf_images(u[small])
    out[large] = _sf_spectral(u[large])
    return out


def xi_quantile(v, max_iter=100):
    # same bracketed Newton scheme as the compiled kernel, vectorized
    from ._tables import LOG_RESID_TOL, LOWER_U, N_NODES, S_HI, S_LO, S_STEP, UPPER_U

    v = np.asarray(v, dtype=float)
    upper = v > 0.5
    s = np.where(upper, -np.log1p(-np.where(upper, v, 0.0)), -np.log(np.where(upper, 0.5, v)))
    pos = (s - S_LO) / S_STEP
    i = np.clip(pos.astype(np.int64), 0, N_NODES - 2)
    frac = np.clip(pos - i, 0.0, 1.0)
    a = np.where(upper, UPPER_U[i], 1.0 / LOWER_U[i])
    b = np.where(upper, UPPER_U[i + 1], 1.0 / LOWER_U[i + 1])
    x = a + frac * (b - a)
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    active = s <= S_HI
    for _ in range(max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        xa = x[idx]
        up = upper[idx]
        u = np.where(up, xa, 1.0 / xa)
        g = np.where(up, xi_sf(u), xi_cdf(u))
        p = xi_pdf(u)
        r = np.log(g) + s[idx]
        slope = np.where(up, -p / g, -p / g * u * u)
        lo_a = np.where(r > 0.0, xa, lo[idx])
        hi_a = np.where(r > 0.0, hi[idx], xa)
        with np.errstate(divide="ignore", invalid="ignore"):
            x_new = xa - r / slope
        x_new = np.where((lo_a < x_new) & (x_new < hi_a), x_new, 0.5 * (lo_a + hi_a))
        hit = np.abs(r) <= LOG_RESID_TOL
        done = hit | (np.abs(x_new - xa) <= 4e-16 * np.abs(xa))
        x_new = np.where(hit, xa, x_new)
        lo[idx] = lo_a
        hi[idx] = hi_a
        x[idx] = x_new
        active[idx[done]] = False
    out = np.where(upper, x, 1.0 / x)
    tail = s > S_HI
    if tail.any():
        out[tail] = _xi_quantile_tail(s[tail], upper[tail])
    return out


def _xi_quantile_tail(s, upper):
    # single-term forms, exact to double precision beyond the table
    k = 2.0 * s + 2.0 * math.log(4.0 / math.sqrt(2.0 * math.pi))
    w = k + np.log(k)
    for _ in range(8):
        w = w - (w - np.log(w) - k) / (1.0 - 1.0 / w)
    return np.where(upper, 2.0 * (s + math.log(2.0)) / math.pi**2, 1.0 / w)


def lambda_sum(x, xi, gam, compensate):
    x = np.asarray(x, dtype=float)
    k_pairs = gam.shape[1] - 1
    c = 1.0 / x
    acc = x * x * (xi[:, 0] + xi[:, 1])
    if k_pairs:
        d = c[:, None] + gam[:, :k_pairs]
        pairs = xi[:, 2 : 2 * k_pairs + 2 : 2] + xi[:, 3 : 2 * k_pairs + 2 : 2]
        acc = acc + (pairs / (d * d)).sum(axis=1)
    if compensate:
        y = 1.0 / (c + gam[:, k_pairs])
        acc = acc + 2.0 / 3.0 * (y + y * y)
    return acc


def lindley(steps):
    # U_k = S_k - min_{i<=k} S_i, the prefix-minimum form of the recursion
    steps = np.asarray(steps, dtype=float)
    reps = steps.shape[0]
    s = np.concatenate([np.zeros((reps, 1)), np.cumsum(steps, axis=1)], axis=1)
    return s - np.minimum.accumulate(s, axis=1)


def _last_true(mask):
    m = mask.shape[1]
    return m - 1 - np.argmax(mask[:, ::-1], axis=1)


def excursions(u):
    u = np.asarray(u, dtype=float)
    m = u.shape[1]
    idx = np.arange(m)
    zero = u == 0.0
    g_n = _last_true(zero)
    before_g = idx[None, :] <= g_n[:, None]
    ustar = np.where(before_g, u, -np.inf).max(axis=1)
    fstar = _last_true((u == ustar[:, None]) & before_g)
    gstar = _last_true(zero & (idx[None, :] <= fstar[:, None]))
    dstar = np.argmax(zero & (idx[None, :] >= fstar[:, None]), axis=1)
    return g_n.astype(np.int64), ustar, fstar.astype(np.int64), gstar.astype(np.int64), dstar.astype(np.int64)


def theta_series(h, tol=1e-17, max_terms=200000):
    h = np.asarray(h, dtype=float)
    out = np.zeros_like(h)
    small = (h > 0.0) & (h < SMALL_H)
    hs = h[small]
    out[small] = hs * np.polyval(SMALL_H_COEFFS[::-1], hs * hs)
    big = np.flatnonzero(h >= SMALL_H)
    if big.size:
        hb = h[big]
        # e^{-k h} below tol/2 once k h > log(2/tol)
        k_max = min(max_terms, int(np.ceil(np.log(2.0 / tol) / hb.min())) + 1)
        acc = np.zeros_like(hb)
        for start in range(1, k_max + 1, 512):
            k = np.arange(start, min(start + 512, k_max + 1), dtype=float)
            e = np.exp(-k[None, :] * hb[:, None])
            term = 2.0 * e * (1.0 - e * e) / (1.0 + e * e) ** 2
            term *= np.where(k % 2 == 1, 1.0, -1.0)
            acc += term.sum(axis=1)
        out[big] = acc
    return out


def ustar_sf_scaled(y, tol=1e-17, max_terms=1000000):
    y = np.asarray(y, dtype=float)
    out = np.ones_like(y)
    tiny = (y > 0.0) & (y < ERFC_SMALL_Y)
    yt = y[tiny]
    out[tiny] = 1.0 + yt * np.polyval(ERFC_COEFFS[::-1], yt * yt)
    pos = np.flatnonzero(y >= ERFC_SMALL_Y)
    if pos.size == 0:
        return out
    order = pos[np.argsort(y[pos])[::-1]]
    # erfc(z) < 1e-17 for z > 6.1, so at most 62 terms per element
    block = 4096
    for start in range(0, order.size, block):
        sel = order[start : start + block]
        ys = y[sel]
        k_max = min(max_terms, int(np.ceil(6.2 / ys.min())) + 1)
        acc = np.zeros_like(ys)
        for k0 in range(1, k_max + 1, 256):
            k = np.arange(k0, min(k0 + 256, k_max + 1), dtype=float)
            term = erfc(k[None, :] * ys[:, None]) * np.where(k % 2 == 1, 1.0, -1.0)
            acc += term.sum(axis=1)
        out[sel] = 2.0 * acc
    return out

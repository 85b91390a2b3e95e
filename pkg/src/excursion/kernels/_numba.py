"""Compiled kernels. Each function mirrors one in ``_numpy`` exactly."""

import math

import numpy as np
from numba import njit

from ._constants import (
    ERFC_COEFFS,
    ERFC_SMALL_Y,
    SMALL_H,
    SMALL_H_COEFFS,
    U_CROSS,
    XI_IMAGE_TERMS,
    XI_SPECTRAL_TERMS,
)
from ._tables import LOG_RESID_TOL, LOWER_U, N_NODES, S_HI, S_LO, S_STEP, UPPER_U

_OPTS = dict(cache=True, nogil=True)

_PI = math.pi
_SQRT_2PI = math.sqrt(2.0 * math.pi)
_LOG_IMAGE_C = math.log(4.0 / _SQRT_2PI)


@njit(**_OPTS)
def _xi_eval(u):
    """(cdf, sf, pdf) at u > 0 using a single exponential.

    Image form below U_CROSS: terms exp(-m^2 / 2u) = q^(m^2) for odd m.
    Spectral form above: terms exp(-k^2 pi^2 u / 2) = r^(k^2).
    """
    if u < U_CROSS:
        q = math.exp(-1.0 / (2.0 * u))
        q8 = q ** 8
        term = q  # q^(m^2), m = 1
        step = q8  # q^(8j) multiplier from m^2 to (m+2)^2
        c = 0.0
        d = 0.0
        for j in range(XI_IMAGE_TERMS):
            m2 = (2.0 * j + 1.0) ** 2
            c += term
            d += (m2 / u - 1.0) * term
            term *= step
            step *= q8
        cdf = 4.0 / math.sqrt(2.0 * _PI * u) * c
        pdf = 2.0 * d / (_SQRT_2PI * u ** 1.5)
        return cdf, 1.0 - cdf, pdf
    r = math.exp(-_PI * _PI * u / 2.0)
    r2 = r * r
    term = r  # r^(k^2), k = 1
    step = r * r2  # r^(2k+1)
    sf = 0.0
    d = 0.0
    sign = 1.0
    for k in range(1, XI_SPECTRAL_TERMS + 1):
        sf += sign * term
        d += sign * k * k * term
        term *= step
        step *= r2
        sign = -sign
    sf *= 2.0
    return 1.0 - sf, sf, _PI * _PI * d


@njit(**_OPTS)
def _xi_pdf_scalar(u):
    if u <= 0.0:
        return 0.0
    return _xi_eval(u)[2]


@njit(**_OPTS)
def _xi_cdf_scalar(u):
    if u <= 0.0:
        return 0.0
    return _xi_eval(u)[0]


@njit(**_OPTS)
def _xi_sf_scalar(u):
    if u <= 0.0:
        return 1.0
    return _xi_eval(u)[1]


@njit(**_OPTS)
def xi_pdf(u):
    out = np.empty(u.shape[0])
    for i in range(u.shape[0]):
        out[i] = _xi_pdf_scalar(u[i])
    return out


@njit(**_OPTS)
def xi_cdf(u):
    out = np.empty(u.shape[0])
    for i in range(u.shape[0]):
        out[i] = _xi_cdf_scalar(u[i])
    return out


@njit(**_OPTS)
def xi_sf(u):
    out = np.empty(u.shape[0])
    for i in range(u.shape[0]):
        out[i] = _xi_sf_scalar(u[i])
    return out


@njit(**_OPTS)
def _xi_quantile_tail(s, upper):
    # Beyond the table a single series term is exact to double precision:
    # 1 - F(u) = 2 exp(-pi^2 u / 2) and F(1/w) = 4 sqrt(w / 2 pi) exp(-w / 2).
    if upper:
        return 2.0 * (s + math.log(2.0)) / (_PI * _PI)
    k = 2.0 * s + 2.0 * _LOG_IMAGE_C
    w = k + math.log(k)
    for _ in range(8):
        w -= (w - math.log(w) - k) / (1.0 - 1.0 / w)
    return 1.0 / w


@njit(**_OPTS)
def _xi_quantile_scalar(v, max_iter):
    # Table nodes give an exact bracket; Newton then runs on log F in 1/u
    # (lower half, nearly linear there) or on log(1 - F) in u (upper half),
    # bisecting whenever a step leaves the bracket.
    upper = v > 0.5
    s = -math.log1p(-v) if upper else -math.log(v)
    if s > S_HI:
        return _xi_quantile_tail(s, upper)
    pos = (s - S_LO) / S_STEP
    i = int(pos)
    if i < 0:
        i = 0
    if i > N_NODES - 2:
        i = N_NODES - 2
    frac = pos - i
    if frac < 0.0:
        frac = 0.0
    if frac > 1.0:
        frac = 1.0
    if upper:
        a = UPPER_U[i]
        b = UPPER_U[i + 1]
        x = a + frac * (b - a)
    else:
        # work in w = 1/u
        a = 1.0 / LOWER_U[i]
        b = 1.0 / LOWER_U[i + 1]
        x = a + frac * (b - a)
    lo = min(a, b)
    hi = max(a, b)
    for _ in range(max_iter):
        if upper:
            _, g, p = _xi_eval(x)
            r = math.log(g) + s
            slope = -p / g
            if r > 0.0:
                lo = x
            else:
                hi = x
        else:
            u = 1.0 / x
            g, _, p = _xi_eval(u)
            r = math.log(g) + s
            # d log F / dw = -(p / F) u^2, decreasing in w
            slope = -p / g * u * u
            if r > 0.0:
                lo = x
            else:
                hi = x
        if abs(r) <= LOG_RESID_TOL:
            break
        x_new = x - r / slope if slope != 0.0 else 0.5 * (lo + hi)
        if not (lo < x_new < hi):
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= 4e-16 * abs(x):
            x = x_new
            break
        x = x_new
    return x if upper else 1.0 / x


@njit(**_OPTS)
def xi_quantile(v, max_iter=100):
    out = np.empty(v.shape[0])
    for i in range(v.shape[0]):
        out[i] = _xi_quantile_scalar(v[i], max_iter)
    return out


@njit(**_OPTS)
def lambda_sum(x, xi, gam, compensate):
    """Partial sums of the lambda series.

    ``xi`` holds 2K+2 columns, ``gam`` holds the K+1 cumulative exponential
    sums Gamma_1..Gamma_{K+1}.
    """
    n = x.shape[0]
    k_pairs = gam.shape[1] - 1
    out = np.empty(n)
    for i in range(n):
        c = 1.0 / x[i]
        acc = x[i] * x[i] * (xi[i, 0] + xi[i, 1])
        for k in range(1, k_pairs + 1):
            d = c + gam[i, k - 1]
            acc += (xi[i, 2 * k] + xi[i, 2 * k + 1]) / (d * d)
        if compensate:
            y = 1.0 / (c + gam[i, k_pairs])
            acc += 2.0 / 3.0 * (y + y * y)
        out[i] = acc
    return out


@njit(**_OPTS)
def lindley(steps):
    reps, n = steps.shape
    u = np.empty((reps, n + 1))
    for r in range(reps):
        cur = 0.0
        u[r, 0] = 0.0
        for k in range(n):
            cur = cur + steps[r, k]
            if cur < 0.0:
                cur = 0.0
            u[r, k + 1] = cur
    return u


@njit(**_OPTS)
def excursions(u):
    reps, m = u.shape
    g_n = np.empty(reps, dtype=np.int64)
    ustar = np.empty(reps)
    fstar = np.empty(reps, dtype=np.int64)
    gstar = np.empty(reps, dtype=np.int64)
    dstar = np.empty(reps, dtype=np.int64)
    for r in range(reps):
        g = m - 1
        while u[r, g] != 0.0:
            g -= 1
        best = 0.0
        f = 0
        last_zero = 0
        gs = 0
        for k in range(g + 1):
            val = u[r, k]
            if val == 0.0:
                last_zero = k
            if val >= best:
                best = val
                f = k
                gs = last_zero
        d = f
        while u[r, d] != 0.0:
            d += 1
        g_n[r] = g
        ustar[r] = best
        fstar[r] = f
        gstar[r] = gs
        dstar[r] = d
    return g_n, ustar, fstar, gstar, dstar


@njit(**_OPTS)
def _theta_series_scalar(h, tol, max_terms):
    if h <= 0.0:
        return 0.0
    if h < SMALL_H:
        h2 = h * h
        p = h
        s = 0.0
        for j in range(SMALL_H_COEFFS.shape[0]):
            s += SMALL_H_COEFFS[j] * p
            p *= h2
        return s
    # Kahan summation of the alternating tail
    s = 0.0
    comp = 0.0
    prev = np.inf
    for k in range(1, max_terms + 1):
        a = k * h
        e = math.exp(-a)
        term = 2.0 * e * (1.0 - e * e) / ((1.0 + e * e) * (1.0 + e * e))
        if k % 2 == 0:
            term = -term
        y = term - comp
        t = s + y
        comp = (t - s) - y
        s = t
        at = abs(term)
        if at < tol and at <= prev:
            break
        prev = at
    return s


@njit(**_OPTS)
def theta_series(h, tol=1e-17, max_terms=200000):
    out = np.empty(h.shape[0])
    for i in range(h.shape[0]):
        out[i] = _theta_series_scalar(h[i], tol, max_terms)
    return out


@njit(**_OPTS)
def ustar_sf_scaled(y, tol=1e-17, max_terms=1000000):
    """2 * sum_{k>=1} (-1)^(k-1) erfc(k y); equals P(U*(t) > x) at y = sqrt(2) x / sqrt(t)."""
    out = np.empty(y.shape[0])
    for i in range(y.shape[0]):
        yi = y[i]
        if yi <= 0.0:
            out[i] = 1.0
            continue
        if yi < ERFC_SMALL_Y:
            y2 = yi * yi
            p = yi
            s = 1.0
            for j in range(ERFC_COEFFS.shape[0]):
                s += ERFC_COEFFS[j] * p
                p *= y2
            out[i] = s
            continue
        s = 0.0
        comp = 0.0
        for k in range(1, max_terms + 1):
            term = math.erfc(k * yi)
            if k % 2 == 0:
                term = -term
            z = term - comp
            t = s + z
            comp = (t - s) - z
            s = t
            if abs(term) < tol:
                break
        out[i] = 2.0 * s
    return out

"""Closed-form laws of the largest complete excursion and their ingredients.

Every density, CDF and survival function here is an infinite series. The
scalar functions sum it term by term under a :class:`SeriesPolicy` and
return an :class:`EvalResult` carrying the value, a truncation error bound
and the number of terms used. Array-valued helpers used by the Monte Carlo
and goodness-of-fit code go through :mod:`excursion.kernels`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import integrate
from scipy.interpolate import CubicHermiteSpline
from scipy.special import erfc, ndtr

from . import kernels
from .errors import AccuracyError, DomainError
from .kernels._constants import ERFC_COEFFS, ERFC_SMALL_Y, SMALL_H, SMALL_H_COEFFS, U_CROSS

__all__ = [
    "SeriesPolicy",
    "EvalResult",
    "Route",
    "DEFAULT_POLICY",
    "xi_density",
    "xi_density_images",
    "xi_density_spectral",
    "xi_cdf",
    "xi_cdf_images",
    "xi_cdf_spectral",
    "xi_laplace",
    "lambda_laplace",
    "ustar_density",
    "ustar_survival",
    "thetastar_density",
    "kolmogorov_survival",
    "arcsine_density",
    "arcsine_cdf",
    "tu_survival",
    "tbhat_density",
    "h_kernel",
    "hhat_kernel",
    "ustar_cdf_array",
    "thetastar_cdf_table",
    "kolmogorov_survival_array",
]

_SQRT_2PI = math.sqrt(2.0 * math.pi)
# argmax of sinh(s)/cosh(s)^2
_THETA_PEAK = math.atanh(1.0 / math.sqrt(2.0))
# crossovers between a series and its Jacobi-dual form
_KOLMOGOROV_CROSS = 0.8
_TU_CROSS = 0.5


@dataclass(frozen=True)
class SeriesPolicy:
    """Truncation contract for every series and quadrature in the package.

    A series stops once a term falls below ``abs_tol`` after the terms have
    started to decrease monotonically. ``quadrature_points`` is the number of
    Gauss-Legendre nodes per panel in fixed-rule quadratures.
    """

    abs_tol: float = 1e-12
    max_terms: int = 100_000
    quadrature_points: int = 32

    def __post_init__(self):
        if not self.abs_tol > 0.0:
            raise DomainError(f"abs_tol must be positive, got {self.abs_tol}")
        if self.max_terms < 8:
            raise DomainError(f"max_terms must be >= 8, got {self.max_terms}")
        if self.quadrature_points < 16:
            raise DomainError(f"quadrature_points must be >= 16, got {self.quadrature_points}")


DEFAULT_POLICY = SeriesPolicy()


@dataclass(frozen=True)
class EvalResult:
    value: float
    est_error: float
    terms_used: int

    def __float__(self) -> float:
        return float(self.value)


class Route(enum.Enum):
    """Independent ways of computing P(U*(t) > x)."""

    TERMWISE = "termwise"
    MIXTURE = "mixture"
    CONVOLUTION = "convolution"


def _sum_series(
    term: Callable[[int], float],
    policy: SeriesPolicy,
    *,
    start: int = 0,
    scale: float = 1.0,
    monotone_from: int = 0,
    what: str = "series",
) -> EvalResult:
    # Terms are collected and summed with math.fsum, so cancellation in long
    # alternating tails costs no precision.
    terms: list[float] = []
    prev = math.inf
    k = start
    while True:
        if len(terms) >= policy.max_terms:
            partial = EvalResult(scale * math.fsum(terms), abs(scale * terms[-1]), len(terms))
            raise AccuracyError(f"{what}: term budget of {policy.max_terms} exhausted", partial)
        t = scale * term(k)
        terms.append(t)
        at = abs(t)
        if k >= monotone_from and at < policy.abs_tol and at <= prev:
            return EvalResult(math.fsum(terms), at, len(terms))
        if k >= monotone_from:
            prev = at
        k += 1


def _check_density(res: EvalResult, policy: SeriesPolicy, what: str) -> EvalResult:
    if res.value < -policy.abs_tol:
        raise AccuracyError(f"{what} evaluated to {res.value!r} < 0", res)
    return EvalResult(max(res.value, 0.0), res.est_error, res.terms_used)


def _check_probability(res: EvalResult, policy: SeriesPolicy, what: str) -> EvalResult:
    if not (-policy.abs_tol <= res.value <= 1.0 + policy.abs_tol):
        raise AccuracyError(f"{what} evaluated to {res.value!r}, outside [0, 1]", res)
    return EvalResult(min(max(res.value, 0.0), 1.0), res.est_error, res.terms_used)


def _positive(name: str, value: float) -> float:
    value = float(value)
    if not value > 0.0 or math.isnan(value):
        raise DomainError(f"{name} must be positive, got {value}")
    return value


def _nonnegative(name: str, value: float) -> float:
    value = float(value)
    if not value >= 0.0:
        raise DomainError(f"{name} must be nonnegative, got {value}")
    return value


# -- Bessel-3 hitting time xi = T_1(R) ----------------------------------------


def xi_density_images(u: float, policy: SeriesPolicy = DEFAULT_POLICY) -> EvalResult:
    """Density of xi from the sum over images exp(-(2k+1)^2 / 2u).

    Converges fastest for small ``u``.
    """
    u = _positive("u", u)
    # terms (m^2/u - 1) exp(-m^2/2u) decrease once m^2 > 3u
    first = max(0, math.ceil((math.sqrt(3.0 * u) - 1.0) / 2.0))

    def term(j):
        m2 = (2.0 * j + 1.0) ** 2
        return (m2 / u - 1.0) * math.exp(-m2 / (2.0 * u))

    return _sum_series(term, policy, scale=2.0 / (_SQRT_2PI * u**1.5), monotone_from=first, what="xi density (images)")


def xi_density_spectral(u: float, policy: SeriesPolicy = DEFAULT_POLICY) -> EvalResult:
    """Density of xi as the derivative of sum_k (-1)^k exp(-k^2 pi^2 u / 2).

    Converges fastest for large ``u``.
    """
    u = _positive("u", u)
    a = math.pi**2 * u / 2.0
    first = math.ceil(math.sqrt(1.0 / a))

    def term(k):
        return (-1.0) ** (k + 1) * k * k * math.exp(-a * k * k)

    return _sum_series(term, policy, start=1, scale=math.pi**2, monotone_from=first, what="xi density (spectral)")


def xi_density(u: float, policy: SeriesPolicy = DEFAULT_POLICY) -> EvalResult:
    """Density p_xi(u) of the first hitting time of level 1 by a BES(3) from 0."""
    u = _positive("u", u)
    res = xi_density_images(u, policy) if u < U_CROSS else xi_density_spectral(u, policy)
    return _check_density(res, policy, "xi density")


def xi_cdf_images(u: float, policy: SeriesPolicy = DEFAULT_POLICY) -> EvalResult:
    u = _positive("u", u)
    return _sum_series(
        lambda j: math.exp(-((2.0 * j + 1.0) ** 2) / (2.0 * u)),
        policy,
        scale=4.0 / math.sqrt(2.0 * math.pi * u),
        what="xi cdf (images)",
    )


def xi_cdf_spectral(u: float, policy: SeriesPolicy = DEFAULT_POLICY) -> EvalResult:
    """F(u) = sum_{k in Z} (-1)^k exp(-k^2 pi^2 u / 2)."""
    u = _positive("u", u)
    a = math.pi**2 * u / 2.0
    tail = _sum_series(lambda k: (-1.0) ** k * math.exp(-a * k * k), policy, start=1, scale=2.0, what="xi cdf (spectral)")
    return EvalResult(1.0 + tail.value, tail.est_error, tail.terms_used + 1)


def xi_cdf(u: float, policy: SeriesPolicy = DEFAULT_POLICY) -> EvalResult:
    """P(xi <= u)."""
    u = _nonnegative("u", u)
    if u == 0.0:
        return EvalResult(0.0, 0.0, 0)
    res = xi_cdf_images(u, policy) if u < U_CROSS else xi_cdf_spectral(u, policy)
    return _check_probability(res, policy, "xi cdf")


def xi_laplace(lam: float) -> float:
    """E[exp(-lam * xi)] = sqrt(2 lam) / sinh(sqrt(2 lam))."""
    lam = _nonnegative("lam", lam)
    return math.exp(-_log_sinhc(math.sqrt(2.0 * lam)))


def _log_sinhc(y: float) -> float:
    # log(sinh(y) / y), exact at y -> 0 and overflow-free for large y
    if y < 1e-3:
        y2 = y * y
        return y2 / 6.0 - y2 * y2 / 180.0 + y2**3 / 2835.0
    return y - math.log(2.0 * y) + math.log1p(-math.exp(-2.0 * y))


def _ycoth_minus_one(y: float) -> float:
    if y < 1e-3:
        y2 = y * y
        return y2 / 3.0 - y2 * y2 / 45.0 + 2.0 * y2**3 / 945.0
    return y / math.tanh(y) - 1.0


def lambda_laplace(mu: float, r: float) -> float:
    """E[exp(-mu * lambda(r))].

    Equal to r^2 e^(1/r) (2mu / sinh^2(r s)) exp(-s coth(r s)) with
    s = sqrt(2 mu), rewritten as exp(-2 log(sinh(y)/y) - (y coth y - 1)/r),
    y = r s, which has no removable singularity at mu = 0 and does not
    overflow for large mu r^2.
    """
    mu = _nonnegative("mu", mu)
    r = _positive("r", r)
    y = r * math.sqrt(2.0 * mu)
    return math.exp(-2.0 * _log_sinhc(y) - _ycoth_minus_one(y) / r)


_PHI_C = 1.0 / math.sqrt(2.0 * math.pi)


# -- U*(t) -----------------------------------------------------------------------


def ustar_density(x: float, t: float, policy: SeriesPolicy = DEFAULT_POLICY) -> EvalResult:
    """Density of U*(t): 4 sqrt(2/(pi t)) sum_{k>=1} (-1)^(k-1) k exp(-2 k^2 x^2 / t)."""
    x = _positive("x", x)
    t = _positive("t", t)
    y = math.sqrt(2.0) * x / math.sqrt(t)
    if y < ERFC_SMALL_Y:
        # minus the derivative of the small-y survival expansion
        j = np.arange(ERFC_COEFFS.size)
        terms = -math.sqrt(2.0 / t) * ERFC_COEFFS * (2 * j + 1) * y ** (2 * j)
        res = EvalResult(math.fsum(terms), abs(float(terms[-1])), int(terms.size))
        return _check_density(res, policy, "U* density")
    a = 2.0 * x * x / t
    first = math.ceil(math.sqrt(t) / (2.0 * x))
    res = _sum_series(
        lambda k: (-1.0) ** (k - 1) * k * math.exp(-a * k * k),
        policy,
        start=1,
        scale=4.0 * math.sqrt(2.0 / (math.pi * t)),
        monotone_from=first,
        what="U* density",
    )
    return _check_density(res, policy, "U* density")


def _ustar_sf_termwise(x: float, t: float, policy: SeriesPolicy) -> EvalResult:
    y = math.sqrt(2.0) * x / math.sqrt(t)
    if y < ERFC_SMALL_Y:
        # the alternating erfc sum needs ~6/y terms here; use its odd-power expansion
        terms = ERFC_COEFFS * y ** (2 * np.arange(ERFC_COEFFS.size) + 1)
        return EvalResult(1.0 + math.fsum(terms), abs(float(terms[-1])), int(terms.size))
    return _sum_series(lambda k: (-1.0) ** (k - 1) * math.erfc(k * y), policy, start=1, scale=2.0, what="U* survival (termwise)")


def _gauss_legendre(n: int):
    return np.polynomial.legendre.leggauss(n)


def _composite_gl(fn, edges, n: int) -> tuple[float, float]:
    # returns (integral, |I_n - I_{n/2}|)
    xg, wg = _gauss_legendre(n)
    xh, wh = _gauss_legendre(n // 2)
    total = 0.0
    coarse = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        half = 0.5 * (b - a)
        mid = 0.5 * (a + b)
        total += half * float(np.dot(wg, fn(mid + half * xg)))
        coarse += half * float(np.dot(wh, fn(mid + half * xh)))
    return total, abs(total - coarse)


def _ustar_sf_mixture(x: float, t: float, policy: SeriesPolicy) -> EvalResult:
    # P(U* > x) = E[P(b* > x / sqrt(t g))] with g arcsine; y = sin^2(phi)
    # turns the arcsine weight into the constant 2/pi on (0, pi/2).
    scale = x / math.sqrt(t)

    def integrand(phi):
        return kolmogorov_survival_array(scale / np.sin(phi))

    knee = min(scale, 1.0)
    inner = [knee * 2.0 ** (k / 2.0) for k in range(-6, 7)]
    edges = [0.0] + [min(p, math.pi / 2) for p in inner if p < math.pi / 2] + [math.pi / 2]
    val, err = _composite_gl(integrand, edges, policy.quadrature_points)
    n_evals = (len(edges) - 1) * policy.quadrature_points
    return EvalResult(2.0 / math.pi * val, 2.0 / math.pi * err, n_evals)


def _ustar_sf_convolution(x: float, t: float, policy: SeriesPolicy) -> EvalResult:
    # P(U*(t) > x) = P(T_U(x) + T_B(x) < t). T_B(x) has the law of x^2 / Z^2 with Z
    # standard normal, so s = x^2 / z^2 turns the first-passage density into 2 phi(z)
    # and the integrand no longer lives on the scale x^2.
    z0 = x / math.sqrt(t)

    def integrand(z):
        rest = t - (x / z) ** 2
        if rest <= 0.0:
            return 0.0
        return 2.0 * _PHI_C * math.exp(-0.5 * z * z) * (1.0 - tu_survival(x, rest, policy).value)

    hi = z0 + 40.0
    pts = [z0 * (1.0 + f) for f in (1e-3, 1e-2, 0.1, 0.5, 2.0) if z0 * (1.0 + f) < hi]
    val, err = integrate.quad(integrand, z0, hi, points=pts, epsabs=0.1 * policy.abs_tol, epsrel=1e-12, limit=400)
    return EvalResult(val, err, 0)


def ustar_survival(
    x: float,
    t: float,
    policy: SeriesPolicy = DEFAULT_POLICY,
    route: Route = Route.TERMWISE,
) -> EvalResult:
    """P(U*(t) > x), computed along one of three independent routes.

    ``TERMWISE`` integrates the density series term by term:
    2 sum_{k>=1} (-1)^(k-1) erfc(sqrt(2) k x / sqrt(t)).
    ``MIXTURE`` averages the Kolmogorov survival function at x / sqrt(t g)
    over the arcsine law of g. ``CONVOLUTION`` uses U*(t) > x iff
    T_U(x) + T_B(x) < t for independent hitting times.
    """
    x = _nonnegative("x", x)
    t = _positive("t", t)
    route = Route(route)
    if x == 0.0:
        return EvalResult(1.0, 0.0, 0)
    if route is Route.TERMWISE:
        res = _ustar_sf_termwise(x, t, policy)
    elif route is Route.MIXTURE:
        res = _ustar_sf_mixture(x, t, policy)
    else:
        res = _ustar_sf_convolution(x, t, policy)
    return _check_probability(res, policy, f"U* survival ({route.value})")


def ustar_cdf_array(x, t: float = 1.0) -> np.ndarray:
    """Vectorized P(U*(t) <= x) from the termwise series (0 for x <= 0)."""
    t = _positive("t", t)
    x = np.asarray(x, dtype=float)
    flat = np.ravel(x)
    y = np.sqrt(2.0 / t) * np.where(flat > 0.0, flat, 0.0)
    out = 1.0 - kernels.ustar_sf_scaled(np.ascontiguousarray(y))
    out = np.clip(out, 0.0, 1.0)
    return out.reshape(x.shape)


# -- theta*(t) -------------------------------------------------------------------


def _theta_term(k: int, h: float) -> float:
    # (-1)^(k+1) sinh(kh)/cosh(kh)^2 written with e = exp(-kh)
    e = math.exp(-k * h)
    e2 = e * e
    return (-1.0) ** (k + 1) * 2.0 * e * (1.0 - e2) / ((1.0 + e2) * (1.0 + e2))


def thetastar_density(x: float, t: float, policy: SeriesPolicy = DEFAULT_POLICY) -> EvalResult:
    """Density of theta*(t):

        (1/x) sum_{k>=1} (-1)^(k+1) sinh(pi k z) / cosh^2(pi k z),  z = sqrt(x / (t - x))

    on (0, t) and 0 elsewhere. When pi z is small the alternating terms decay
    slowly; below ``SMALL_H`` the sum is replaced by its Boole expansion in
    odd powers of pi z, whose coefficients come from Euler numbers. The
    density blows up like pi / (4 sqrt(t x)) as x -> 0.
    """
    t = _positive("t", t)
    x = float(x)
    if not (0.0 < x < t):
        return EvalResult(0.0, 0.0, 0)
    z = math.sqrt(x / (t - x))
    h = math.pi * z
    if h < SMALL_H:
        powers = h ** (2 * np.arange(SMALL_H_COEFFS.size) + 1)
        terms = SMALL_H_COEFFS * powers / x
        res = EvalResult(math.fsum(terms), abs(float(terms[-1])), int(terms.size))
    else:
        res = _sum_series(
            lambda k: _theta_term(k, h),
            policy,
            start=1,
            scale=1.0 / x,
            monotone_from=math.ceil(_THETA_PEAK / h),
            what="theta* density",
        )
    return _check_density(res, policy, "theta* density")


class ThetaStarCdf:
    """Tabulated CDF of theta*(1), evaluated for any t by scaling.

    Uses z = sqrt(x / (t - x)), under which the density becomes the smooth
    function 2 S(pi z) / (z (1 + z^2)) on (0, inf) with value pi/2 at 0.
    The CDF is accumulated by Gauss-Legendre on each panel of a uniform
    z-grid and interpolated by cubic Hermite splines using the exact
    derivative.
    """

    Z_MAX = 12.0  # tail mass beyond is below 1e-16

    def __init__(self, n_nodes: int = 2048, gl_points: int = 8):
        z = np.linspace(0.0, self.Z_MAX, n_nodes)
        xg, wg = _gauss_legendre(gl_points)
        half = 0.5 * np.diff(z)
        mids = 0.5 * (z[:-1] + z[1:])
        pts = mids[:, None] + half[:, None] * xg[None, :]
        panel = half * (self._dens_z(pts.ravel()).reshape(pts.shape) @ wg)
        cdf = np.concatenate([[0.0], np.cumsum(panel)])
        self.mass = float(cdf[-1])
        self._spline = CubicHermiteSpline(z, cdf, self._dens_z(z))
        self.n_nodes = n_nodes

    @staticmethod
    def _dens_z(z):
        z = np.asarray(z, dtype=float)
        out = np.full(z.shape, math.pi / 2.0)
        pos = z > 0.0
        zp = z[pos]
        out[pos] = 2.0 * kernels.theta_series(np.ascontiguousarray(math.pi * zp)) / (zp * (1.0 + zp * zp))
        return out

    def __call__(self, x, t: float = 1.0):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        inside = (x > 0.0) & (x < t)
        xi = x[inside]
        z = np.sqrt(xi / (t - xi))
        vals = np.where(z >= self.Z_MAX, 1.0, self._spline(np.minimum(z, self.Z_MAX)))
        out[inside] = np.clip(vals, 0.0, 1.0)
        out[x >= t] = 1.0
        return out


@lru_cache(maxsize=4)
def thetastar_cdf_table(n_nodes: int = 2048) -> ThetaStarCdf:
    """Cached :class:`ThetaStarCdf`."""
    return ThetaStarCdf(n_nodes)


# -- Kolmogorov, arcsine, hitting times ------------------------------------------------


def kolmogorov_survival(x: float, policy: SeriesPolicy = DEFAULT_POLICY) -> EvalResult:
    """P(b* > x) = 2 sum_{k>=1} (-1)^(k-1) exp(-2 k^2 x^2), b* = sup |Brownian bridge|.

    Below x = 0.8 the Jacobi-dual form
    1 - (sqrt(2 pi)/x) sum_{k>=1} exp(-(2k-1)^2 pi^2 / (8 x^2)) is summed instead.
    """
    x = _nonnegative("x", x)
    if x == 0.0:
        return EvalResult(1.0, 0.0, 0)
    if x >= _KOLMOGOROV_CROSS:
        res = _sum_series(lambda k: (-1.0) ** (k - 1) * math.exp(-2.0 * k * k * x * x), policy, start=1, scale=2.0)
    else:
        if x < 0.04:
            # leading dual term is below exp(-770): the CDF underflows
            return EvalResult(1.0, 0.0, 0)
        c = math.pi**2 / (8.0 * x * x)
        cdf = _sum_series(lambda k: math.exp(-((2 * k - 1) ** 2) * c), policy, start=1, scale=_SQRT_2PI / x)
        res = EvalResult(1.0 - cdf.value, cdf.est_error, cdf.terms_used)
    return _check_probability(res, policy, "Kolmogorov survival")


def kolmogorov_survival_array(x) -> np.ndarray:
    """Vectorized P(b* > x), machine precision, 0 < x allowed to be inf."""
    x = np.asarray(x, dtype=float)
    out = np.ones(x.shape)
    big = x >= _KOLMOGOROV_CROSS
    small = (x >= 0.04) & ~big
    k = np.arange(1, 9, dtype=float)
    xb = x[big][..., None]
    out[big] = 2.0 * (np.where(k % 2 == 1, 1.0, -1.0) * np.exp(-2.0 * k * k * xb * xb)).sum(axis=-1)
    xs = x[small][..., None]
    m = 2.0 * np.arange(1, 6, dtype=float) - 1.0
    out[small] = 1.0 - _SQRT_2PI / xs[..., 0] * np.exp(-m * m * math.pi**2 / (8.0 * xs * xs)).sum(axis=-1)
    return np.clip(out, 0.0, 1.0)


def arcsine_density(y: float) -> float:
    """Density 1 / (pi sqrt(y (1 - y))) of the last zero g(1) before time 1."""
    y = float(y)
    if not (0.0 < y < 1.0):
        return 0.0
    return 1.0 / (math.pi * math.sqrt(y * (1.0 - y)))


def arcsine_cdf(y: float) -> float:
    y = float(y)
    if y <= 0.0:
        return 0.0
    if y >= 1.0:
        return 1.0
    return 2.0 / math.pi * math.asin(math.sqrt(y))


def tu_survival(a: float, t: float, policy: SeriesPolicy = DEFAULT_POLICY) -> EvalResult:
    """P(T_U(a) > t) for the hitting time of level a by reflected Brownian motion.

    Spectral series (4/pi) sum_{k>=0} (-1)^k/(2k+1) exp(-(2k+1)^2 pi^2 t / (8 a^2))
    for t/a^2 >= 0.5; below that the image series
    1 - 4 sum_{k>=1} (-1)^(k-1) Q((2k-1) a / sqrt(t)), Q the normal tail.
    """
    a = _positive("a", a)
    t = _positive("t", t)
    tau = t / a / a
    if tau < 2e-3:
        # the leading image term is 4 Q(22.3) < 1e-100
        return EvalResult(1.0, 0.0, 0)
    if tau >= _TU_CROSS:
        c = math.pi**2 * tau / 8.0
        res = _sum_series(
            lambda k: (-1.0) ** k / (2 * k + 1) * math.exp(-((2 * k + 1) ** 2) * c),
            policy,
            scale=4.0 / math.pi,
            what="T_U survival",
        )
    else:
        root = math.sqrt(tau)
        hit = _sum_series(
            lambda k: (-1.0) ** (k - 1) * float(ndtr(-(2 * k - 1) / root)),
            policy,
            start=1,
            scale=4.0,
            what="T_U survival (images)",
        )
        res = EvalResult(1.0 - hit.value, hit.est_error, hit.terms_used)
    return _check_probability(res, policy, "T_U survival")


def tbhat_density(a: float, t: float) -> float:
    """First-passage density a / sqrt(2 pi t^3) exp(-a^2 / 2t) of Brownian motion at level a."""
    a = _positive("a", a)
    t = float(t)
    if t <= 0.0:
        return 0.0
    return a / math.sqrt(2.0 * math.pi * t**3) * math.exp(-a * a / (2.0 * t))


# -- H and H-hat -------------------------------------------------------------------


def h_kernel(a: float, b: float, policy: SeriesPolicy = DEFAULT_POLICY) -> EvalResult:
    """H(a, b) = E[(b - a xi)^(-1/2); b - a xi > 0]
    = (a / b^(3/2)) sum_{k in Z} |1+2k| exp(-(1+2k)^2 a / (2b)), and 0 for b <= 0.
    """
    a = _positive("a", a)
    b = float(b)
    if b <= 0.0:
        return EvalResult(0.0, 0.0, 0)
    rho = a / (2.0 * b)
    # m exp(-rho m^2) decreases once m^2 > 1/(2 rho)
    first = max(0, math.ceil((math.sqrt(b / a) - 1.0) / 2.0))

    def term(j):
        m = 2.0 * j + 1.0
        return m * math.exp(-rho * m * m)

    # k and -1-k give the same |1+2k|, hence the factor 2
    res = _sum_series(term, policy, scale=2.0 * a / b**1.5, monotone_from=first, what="H kernel")
    return _check_density(res, policy, "H kernel")


def hhat_kernel(a: float, b: float, c: float, policy: SeriesPolicy = DEFAULT_POLICY) -> EvalResult:
    """H^(a, b, c) = E[(a xi - b)^(-3/2) exp(-c / (a xi - b)); a xi - b > 0]
    = (pi^(5/2) / (2 a sqrt(c))) sum_{k in Z} (-1)^(k+1) k^2 exp(-k^2 pi^2 b/(2a) - |k| pi sqrt(2c/a)).

    The closed form rests on the series for P(xi <= u), valid for u >= 0 only,
    so ``b`` must be nonnegative.
    """
    a = _positive("a", a)
    c = _positive("c", c)
    b = _nonnegative("b", b)
    alpha = math.pi**2 * b / (2.0 * a)
    beta = math.pi * math.sqrt(2.0 * c / a)
    # k^2 exp(-alpha k^2 - beta k) decreases once 2 alpha k^2 + beta k > 2
    if alpha > 0.0:
        first = math.ceil((-beta + math.sqrt(beta * beta + 16.0 * alpha)) / (4.0 * alpha))
    else:
        first = math.ceil(2.0 / beta)
    res = _sum_series(
        lambda k: (-1.0) ** (k + 1) * k * k * math.exp(-alpha * k * k - beta * k),
        policy,
        start=1,
        scale=math.pi**2.5 / (a * math.sqrt(c)),
        monotone_from=first,
        what="H-hat kernel",
    )
    return _check_density(res, policy, "H-hat kernel")

"""Goodness of fit of normalized Lindley statistics against the Brownian limit."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence, TextIO

import numpy as np

from .errors import DomainError
from .joint import MonteCarloEstimate, rect_probs
from .lindley import StepDistribution, batch_simulate
from .rng import RngStream, Var
from .samplers import DEFAULT_TRUNCATION, LambdaTruncation
from .series import DEFAULT_POLICY, SeriesPolicy, kolmogorov_survival, thetastar_cdf_table, ustar_cdf_array

__all__ = [
    "EmpiricalCdf",
    "KSResult",
    "RectError",
    "GoFReport",
    "DEFAULT_RECTANGLES",
    "REPORT_COLUMNS",
    "empirical_cdf",
    "ks_statistic",
    "ks_one_sample",
    "ustar_reference_cdf",
    "thetastar_reference_cdf",
    "convergence_report",
    "write_reports_csv",
]

# Corners sit halfway between lattice points of U*_n/sqrt(n) and theta*_n/n
# for n = 4096, so ties at the corner cannot occur for Rademacher walks.
DEFAULT_RECTANGLES: tuple[tuple[float, float], ...] = (
    (32.5 / 64, 409.5 / 4096),
    (32.5 / 64, 2048.5 / 4096),
    (48.5 / 64, 1024.5 / 4096),
    (64.5 / 64, 409.5 / 4096),
    (64.5 / 64, 2048.5 / 4096),
)

_PROBE_POINTS = 257


class EmpiricalCdf:
    """Right-continuous step function x -> #{samples <= x} / N."""

    def __init__(self, samples):
        x = np.asarray(samples, dtype=float).ravel()
        if x.size == 0:
            raise DomainError("empirical_cdf needs at least one sample")
        if np.isnan(x).any():
            raise DomainError("samples contain NaN")
        self.sorted = np.sort(x)

    def __len__(self):
        return self.sorted.size

    def __call__(self, x):
        return np.searchsorted(self.sorted, x, side="right") / self.sorted.size


def empirical_cdf(samples) -> EmpiricalCdf:
    return EmpiricalCdf(samples)


class KSResult(NamedTuple):
    statistic: float
    p_value: float


def _check_cdf_values(f: np.ndarray, tol: float, what: str):
    if np.isnan(f).any():
        raise DomainError(f"{what}: cdf returned NaN")
    if f.min() < -tol or f.max() > 1.0 + tol:
        raise DomainError(f"{what}: cdf leaves [0, 1]")
    if np.any(np.diff(f) < -tol):
        raise DomainError(f"{what}: cdf is not monotone")


def ks_statistic(samples, cdf: Callable, weights=None, tol: float = 1e-12) -> tuple[float, float]:
    """sup |ECDF - cdf| and the effective sample size.

    The supremum is attained at a jump, so it is the larger of
    max(ECDF(x_i) - F(x_i)) and max(F(x_i) - ECDF(x_i-)) over sorted x_i;
    ties are handled because only the last of a tied run has the full
    ECDF value and only the first sees the left limit. With ``weights`` the
    ECDF is self-normalized and the effective size is (sum w)^2 / sum w^2.
    """
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise DomainError("ks needs at least one sample")
    order = np.argsort(x, kind="stable")
    xs = x[order]
    f = np.asarray(cdf(xs), dtype=float)
    _check_cdf_values(f, tol, "ks")
    lo, hi = xs[0], xs[-1]
    if hi > lo:
        probe = np.asarray(cdf(np.linspace(lo, hi, _PROBE_POINTS)), dtype=float)
        _check_cdf_values(probe, tol, "ks probe")
    f = np.clip(f, 0.0, 1.0)
    if weights is None:
        n = xs.size
        upper = np.arange(1, n + 1) / n
        lower = np.arange(0, n) / n
        n_eff = float(n)
    else:
        w = np.asarray(weights, dtype=float).ravel()[order]
        if w.shape != xs.shape or np.any(w < 0.0) or not w.sum() > 0.0:
            raise DomainError("weights must be nonnegative, match samples, and not all zero")
        cw = np.cumsum(w)
        total = cw[-1]
        upper = cw / total
        lower = np.concatenate([[0.0], upper[:-1]])
        n_eff = float(total * total / np.dot(w, w))
    d = max(float(np.max(upper - f)), float(np.max(f - lower)))
    return min(max(d, 0.0), 1.0), n_eff


def ks_one_sample(samples, cdf: Callable, policy: SeriesPolicy = DEFAULT_POLICY, weights=None) -> KSResult:
    """One-sample KS statistic with its asymptotic p-value P(b* > sqrt(N) D)."""
    d, n_eff = ks_statistic(samples, cdf, weights, policy.abs_tol)
    p = kolmogorov_survival(math.sqrt(n_eff) * d, policy).value
    return KSResult(d, p)


def ustar_reference_cdf(x):
    """P(U*(1) <= x)."""
    return ustar_cdf_array(x, 1.0)


def thetastar_reference_cdf(x):
    """P(theta*(1) <= x) from the tabulated quadrature."""
    return thetastar_cdf_table()(x, 1.0)


@dataclass(frozen=True)
class RectError:
    a: float
    b: float
    empirical: float
    analytic: float
    stderr: float

    @property
    def z(self) -> float:
        return (self.empirical - self.analytic) / self.stderr if self.stderr > 0 else math.inf


@dataclass(frozen=True)
class GoFReport:
    n: int
    reps: int
    ks_ustar: float
    ks_theta: float
    p_ustar: float
    p_theta: float
    degenerate_fraction: float
    rect_errors: tuple[RectError, ...] = field(default_factory=tuple)


def convergence_report(
    dist: StepDistribution,
    n_grid: Sequence[int],
    reps: int,
    rng: RngStream,
    policy: SeriesPolicy = DEFAULT_POLICY,
    rectangles: Sequence[tuple[float, float]] = DEFAULT_RECTANGLES,
    n_reference: int = 10**6,
    trunc: LambdaTruncation = DEFAULT_TRUNCATION,
    threads: int | None = None,
    reference: Sequence[MonteCarloEstimate] | None = None,
) -> list[GoFReport]:
    """KS distances and rectangle errors of the normalized pair for each n.

    Depends on ``rng`` only through its identity, so the report is a pure
    function of (dist, n_grid, reps, seed). ``reference`` may supply
    precomputed rectangle probabilities in the order of ``rectangles``.
    """
    n_grid = [int(n) for n in n_grid]
    if not n_grid or any(b <= a for a, b in zip(n_grid[:-1], n_grid[1:])) or n_grid[0] < 1:
        raise DomainError(f"n_grid must be a strictly increasing list of positive ints, got {n_grid}")
    rectangles = [(float(a), float(b)) for a, b in rectangles]
    if rectangles and reference is None:
        reference = rect_probs(rectangles, 1.0, n_reference, rng.child(Var.REFERENCE), trunc, threads)
    reference = list(reference or [])
    if len(reference) != len(rectangles):
        raise DomainError("reference must match rectangles")

    reports = []
    for n in n_grid:
        batch = batch_simulate(dist, n, reps, rng.child(Var.STEPS, n), threads)
        ks_u = ks_one_sample(batch.ustar, ustar_reference_cdf, policy)
        ks_t = ks_one_sample(batch.theta, thetastar_reference_cdf, policy)
        errs = []
        for (a, b), ref in zip(rectangles, reference):
            p = float(np.mean((batch.ustar <= a) & (batch.theta <= b)))
            se = math.sqrt(p * (1.0 - p) / reps + ref.std_error**2)
            errs.append(RectError(a, b, p, ref.mean, se))
        reports.append(
            GoFReport(n, reps, ks_u.statistic, ks_t.statistic, ks_u.p_value, ks_t.p_value, batch.degenerate_fraction, tuple(errs))
        )
    return reports


REPORT_COLUMNS = (
    "kind",
    "n",
    "reps",
    "ks_ustar",
    "p_ustar",
    "ks_theta",
    "p_theta",
    "degenerate_fraction",
    "a",
    "b",
    "empirical",
    "analytic",
    "stderr",
)


def _fmt(v) -> str:
    return repr(float(v))


def write_reports_csv(reports: Sequence[GoFReport], fh: TextIO) -> None:
    """One ``summary`` row per n followed by one ``rect`` row per rectangle."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(REPORT_COLUMNS)
    for r in reports:
        w.writerow(["summary", r.n, r.reps, _fmt(r.ks_ustar), _fmt(r.p_ustar), _fmt(r.ks_theta), _fmt(r.p_theta), _fmt(r.degenerate_fraction), "", "", "", "", ""])
        for e in r.rect_errors:
            w.writerow(["rect", r.n, r.reps, "", "", "", "", "", _fmt(e.a), _fmt(e.b), _fmt(e.empirical), _fmt(e.analytic), _fmt(e.stderr)])

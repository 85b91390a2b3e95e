import csv
import io
import math

import numpy as np
import pytest

from excursion import kernels
from excursion import series as S
from excursion.convergence import (
    DEFAULT_RECTANGLES,
    REPORT_COLUMNS,
    GoFReport,
    RectError,
    convergence_report,
    empirical_cdf,
    ks_one_sample,
    ks_statistic,
    thetastar_reference_cdf,
    ustar_reference_cdf,
    write_reports_csv,
)
from excursion.errors import DomainError
from excursion.joint import MonteCarloEstimate
from excursion.lindley import StepDistribution
from excursion.rng import RngStream
from excursion.samplers import sample_arcsine_g1, sample_xi

from conftest import SEED

arcsine_cdf = np.vectorize(S.arcsine_cdf)


def xi_cdf(u):
    return kernels.xi_cdf(np.atleast_1d(np.asarray(u, dtype=float)))


def test_ecdf_examples():
    F = empirical_cdf([1.0, 2.0, 3.0])
    assert F(2.0) == pytest.approx(2 / 3)
    assert F(-math.inf) == 0.0 and F(math.inf) == 1.0
    assert F(1.999) == pytest.approx(1 / 3)
    with pytest.raises(DomainError):
        empirical_cdf([])
    with pytest.raises(DomainError):
        empirical_cdf([1.0, math.nan])


def test_ecdf_matches_counting():
    rng = np.random.default_rng(0)
    for _ in range(100):
        x = np.round(rng.normal(size=int(rng.integers(1, 40))), 1)
        q = rng.normal(size=20)
        F = empirical_cdf(x)
        want = [sum(1 for v in x if v <= p) / len(x) for p in q]
        np.testing.assert_allclose(F(q), want, rtol=0, atol=0)


def test_single_sample_at_median():
    d, n = ks_statistic([0.5], lambda x: np.clip(x, 0.0, 1.0))
    assert d == 0.5 and n == 1.0


def _dense_oracle(x, cdf):
    # sup over a grid holding every sample, a point just left of it, and a uniform mesh
    lo, hi = x.min() - 1.0, x.max() + 1.0
    grid = np.unique(np.concatenate([x, x - 1e-12, np.linspace(lo, hi, 2001)]))
    ecdf = np.array([np.count_nonzero(x <= g) for g in grid]) / x.size
    return float(np.max(np.abs(ecdf - cdf(grid))))


def test_ks_jump_formula_matches_dense_grid():
    rng = np.random.default_rng(1)
    normal_cdf = lambda v: 0.5 * (1.0 + np.vectorize(math.erf)(np.asarray(v) / math.sqrt(2.0)))  # noqa: E731
    for i in range(50):
        x = rng.normal(size=int(rng.integers(1, 60)))
        if i % 2:
            x = np.round(x, 1)  # ties
        d, _ = ks_statistic(x, normal_cdf)
        assert abs(d - _dense_oracle(x, normal_cdf)) <= 1e-9


def test_ks_invariant_under_monotone_transform():
    rng = np.random.default_rng(2)
    g = lambda v: v**3 + v  # noqa: E731
    for _ in range(20):
        x = rng.uniform(size=int(rng.integers(5, 200)))
        d1, _ = ks_statistic(x, lambda v: np.clip(v, 0.0, 1.0))
        # cdf of g(X) is F(g^-1(y)); the real root of v^3 + v = y by Cardano
        def cdf_y(y):
            y = np.asarray(y, dtype=float)
            r = np.sqrt(y * y / 4.0 + 1.0 / 27.0)
            return np.clip(np.cbrt(y / 2.0 + r) + np.cbrt(y / 2.0 - r), 0.0, 1.0)

        d2, _ = ks_statistic(g(x), cdf_y)
        assert abs(d1 - d2) <= 1e-12


def test_weighted_ks_with_unit_weights_is_plain_ks():
    x = np.random.default_rng(3).uniform(size=500)
    F = lambda v: np.clip(v, 0.0, 1.0)  # noqa: E731
    d0, n0 = ks_statistic(x, F)
    d1, n1 = ks_statistic(x, F, weights=np.ones(500))
    assert d0 == pytest.approx(d1, abs=1e-15) and n1 == pytest.approx(n0)
    with pytest.raises(DomainError):
        ks_statistic(x, F, weights=-np.ones(500))


def test_ks_rejects_bad_cdf():
    x = np.linspace(0.1, 0.9, 20)
    with pytest.raises(DomainError):
        ks_statistic(x, lambda v: 1.0 - np.asarray(v))
    with pytest.raises(DomainError):
        ks_statistic(x, lambda v: 2.0 * np.asarray(v))
    with pytest.raises(DomainError):
        ks_statistic([], lambda v: v)


def test_arcsine_self_consistency():
    g = sample_arcsine_g1(RngStream(SEED, 70), 10**5)
    assert ks_one_sample(g, arcsine_cdf).p_value > 1e-3


def test_null_p_values_are_super_uniform():
    failures = 0
    for i in range(50):
        g = sample_arcsine_g1(RngStream(SEED, 100 + i), 2000)
        x = sample_xi(RngStream(SEED, 200 + i), 2000)
        failures += ks_one_sample(g, arcsine_cdf).p_value < 1e-3
        failures += ks_one_sample(x, xi_cdf).p_value < 1e-3
    assert failures <= 1


def test_reference_cdfs():
    assert ustar_reference_cdf(np.array([0.0]))[0] == 0.0
    assert ustar_reference_cdf(np.array([0.5]))[0] == pytest.approx(1 - S.ustar_survival(0.5, 1.0).value, abs=1e-12)
    assert thetastar_reference_cdf(np.array([0.0, 1.0])).tolist() == [0.0, 1.0]


def _fake_reference(rects):
    return [MonteCarloEstimate(0.5, 0.01, 10, 0) for _ in rects]


def test_report_is_pure_function_of_seed():
    kw = dict(reps=300, reference=_fake_reference(DEFAULT_RECTANGLES))
    a = convergence_report("rademacher", (16, 64), rng=RngStream(5), **kw)
    b = convergence_report(StepDistribution.RADEMACHER, [16, 64], rng=RngStream(5), **kw)
    assert a == b
    c = convergence_report("rademacher", (16, 64), rng=RngStream(6), **kw)
    assert a != c


def test_report_with_one_rep():
    (r,) = convergence_report("gaussian", (32,), 1, RngStream(1), rectangles=())
    assert 0.0 <= r.ks_ustar <= 1.0 and 0.0 <= r.ks_theta <= 1.0
    assert 0.0 <= r.p_ustar <= 1.0 and 0.0 <= r.p_theta <= 1.0
    assert r.rect_errors == ()


def test_degenerate_fraction_decreases():
    reps = convergence_report("rademacher", (16, 256, 4096), 2000, RngStream(SEED, 71), rectangles=())
    fr = [r.degenerate_fraction for r in reps]
    assert fr[0] > fr[1] > fr[2]


def test_report_rect_fields():
    rects = [(0.5, 0.5)]
    ref = [MonteCarloEstimate(0.3, 0.002, 10**6, 0)]
    (r,) = convergence_report("rademacher", (64,), 1000, RngStream(2), rectangles=rects, reference=ref)
    (e,) = r.rect_errors
    assert (e.a, e.b, e.analytic) == (0.5, 0.5, 0.3)
    assert e.stderr == pytest.approx(math.sqrt(e.empirical * (1 - e.empirical) / 1000 + 0.002**2))
    assert e.z == pytest.approx((e.empirical - 0.3) / e.stderr)


def test_report_validation():
    with pytest.raises(DomainError):
        convergence_report("rademacher", (64, 16), 10, RngStream(1), rectangles=())
    with pytest.raises(DomainError):
        convergence_report("rademacher", (), 10, RngStream(1), rectangles=())
    with pytest.raises(DomainError):
        convergence_report("rademacher", (16,), 10, RngStream(1), rectangles=[(0.5, 0.5)], reference=[])


def test_csv_layout():
    rep = GoFReport(64, 10, 0.1, 0.2, 0.3, 0.4, 0.05, (RectError(0.5, 0.25, 0.3, 0.31, 0.01),))
    buf = io.StringIO()
    write_reports_csv([rep, rep], buf)
    rows = list(csv.reader(io.StringIO(buf.getvalue())))
    assert tuple(rows[0]) == REPORT_COLUMNS
    assert [r[0] for r in rows[1:]] == ["summary", "rect", "summary", "rect"]
    assert all(len(r) == len(REPORT_COLUMNS) for r in rows)
    summary = dict(zip(REPORT_COLUMNS, rows[1]))
    assert float(summary["ks_ustar"]) == 0.1 and float(summary["degenerate_fraction"]) == 0.05
    rect = dict(zip(REPORT_COLUMNS, rows[2]))
    assert float(rect["analytic"]) == 0.31

import math

import numpy as np
import pytest
from scipy import integrate, stats

from excursion import kernels
from excursion import series as S
from excursion.errors import ConfigurationError, DomainError
from excursion.rng import RngStream, Var
from excursion.samplers import (
    LambdaTruncation,
    WeightedSample,
    expected_tail,
    pairs_needed,
    pairs_uniform,
    sample_alpha1,
    sample_arcsine_g1,
    sample_joint_weighted,
    sample_lambda,
    sample_xi,
)

from conftest import BIG, SEED, mean_se

KS_CRIT = 1.95 / math.sqrt(1e5)


# -- xi -------------------------------------------------------------------------------------


def test_xi_mean(xi_big):
    m, se = mean_se(xi_big)
    assert abs(m - 1.0 / 3.0) <= 3 * se


def test_xi_ks():
    x = sample_xi(RngStream(SEED, 20), 10**5)
    d = stats.kstest(x, lambda u: kernels.xi_cdf(np.atleast_1d(np.asarray(u, dtype=float)))).statistic
    assert d < KS_CRIT


def test_xi_draws_solve_cdf_equation():
    # replay the uniforms the sampler used and check |F(u) - V|
    rng = RngStream(SEED, 21)
    x = sample_xi(RngStream(SEED, 21), 5000)
    v = rng.split().child(Var.CHUNK, 0).uniform(5000)
    assert np.max(np.abs(kernels.xi_cdf(x) - v)) <= 1e-10


def test_xi_determinism_and_scalar():
    a = sample_xi(RngStream(3, 4), 1000)
    b = sample_xi(RngStream(3, 4), 1000)
    np.testing.assert_array_equal(a, b)
    assert np.all(a > 0.0)
    v = sample_xi(RngStream(3, 4))
    assert isinstance(v, float) and v > 0.0


def test_sampler_advances_stream():
    r = RngStream(3)
    a = sample_xi(r, 10)
    b = sample_xi(r, 10)
    assert not np.array_equal(a, b)


def test_negative_size_rejected():
    with pytest.raises(DomainError):
        sample_xi(RngStream(1), -1)


# -- alpha_1 and g(1) ------------------------------------------------------------------------------


def test_alpha1():
    a = sample_alpha1(RngStream(SEED, 22), BIG)
    m, se = mean_se(a)
    assert abs(m - 2.0 / math.pi) <= 3 * se
    assert np.all((a > 0.0) & (a < 1.0))
    d = stats.kstest(a[: 10**5], lambda s: 2.0 / math.pi * np.arcsin(s)).statistic
    assert d < KS_CRIT


def test_arcsine_g1():
    g = sample_arcsine_g1(RngStream(SEED, 23), 10**5)
    assert abs(np.median(g) - 0.5) <= 0.01
    d = stats.kstest(g, np.vectorize(S.arcsine_cdf)).statistic
    assert d < KS_CRIT
    assert np.all((g > 0.0) & (g < 1.0))


def test_exponentials_have_unit_rate():
    for var in (Var.E0_PRIME, Var.LAMBDA_EXP):
        e = RngStream(SEED, 24).child(var, 0).exponential(BIG)
        m, se = mean_se(e)
        assert abs(m - 1.0) <= 3 * se


# -- lambda --------------------------------------------------------------------------------


@pytest.mark.parametrize("x", [0.5, 1.0, 2.0])
def test_lambda_mean(lambda_big, x):
    m, se = mean_se(lambda_big[x])
    assert abs(m - 2.0 / 3.0 * (x + x * x)) <= 3 * se


def test_lambda_mean_small_argument():
    x = 0.01
    m, se = mean_se(sample_lambda(x, RngStream(SEED, 25), 10**5))
    assert abs(m - 2.0 / 3.0 * (x + x * x)) <= 3 * se


def test_lambda_laplace_mc(lambda_big):
    for r in (0.5, 1.0, 2.0):
        m, se = mean_se(np.exp(-lambda_big[r]))
        assert abs(m - S.lambda_laplace(1.0, r)) <= 3 * se


def test_lambda_doubling_pairs():
    tol = LambdaTruncation().tail_tol
    k = pairs_needed(1.0)
    a = sample_lambda(1.0, RngStream(SEED, 26), 10**5, pairs=k)
    b = sample_lambda(1.0, RngStream(SEED, 26), 10**5, pairs=2 * k)
    assert abs(a.mean() - b.mean()) < 3 * tol


def test_lambda_compensation_keeps_mean_exact():
    # two pairs only: without the compensator the mean falls short by expected_tail
    x = 1.0
    n = 4 * 10**5
    on = sample_lambda(x, RngStream(SEED, 27), n, pairs=2)
    off = sample_lambda(x, RngStream(SEED, 27), n, pairs=2, trunc=LambdaTruncation(compensate=False))
    m_on, se_on = mean_se(on)
    m_off, se_off = mean_se(off)
    target = 2.0 / 3.0 * (x + x * x)
    assert abs(m_on - target) <= 3 * se_on
    assert abs(m_off - (target - expected_tail(x, 2))) <= 3 * se_off


def _tail_oracle(x, k_pairs, k_max=1200):
    # sum of E[(1/x + Gamma_k)^-2] term by term, gamma(k) densities
    c = 1.0 / x
    total = 0.0
    for k in range(k_pairs + 1, k_max):
        f = lambda y, k=k: stats.gamma.pdf(y, k) / (c + y) ** 2
        lo, hi = max(0.0, k - 12 * math.sqrt(k)), k + 12 * math.sqrt(k) + 12
        total += integrate.quad(f, lo, hi, limit=200)[0]
    # remainder beyond k_max: E[(c + Gamma_k)^-2] = (c + k)^-2 (1 + O(1/k)), summed by midpoint rule
    total += 1.0 / (k_max + c - 0.5)
    return 2.0 / 3.0 * total


@pytest.mark.parametrize("x,k", [(1.0, 5), (0.5, 20), (3.0, 2)])
def test_expected_tail_matches_termwise_sum(x, k):
    assert expected_tail(x, k) == pytest.approx(_tail_oracle(x, k), rel=2e-3)


def test_expected_tail_zero_pairs():
    assert expected_tail(2.0, 0) == pytest.approx(4.0 / 3.0)
    assert expected_tail(2.0, 1) < expected_tail(2.0, 0)


def test_pairs_needed_rule():
    trunc = LambdaTruncation(tail_tol=0.05)
    for x in (0.1, 1.0, 10.0):
        k = pairs_needed(x, trunc)
        assert expected_tail(x, k) < trunc.tail_tol
        if k > 0:
            assert expected_tail(x, k - 1) >= trunc.tail_tol
    assert pairs_needed(1e-3, trunc) == 0
    assert pairs_needed(1.0, LambdaTruncation(0.01)) >= pairs_needed(1.0, LambdaTruncation(0.05))


def test_pairs_uniform_bound():
    trunc = LambdaTruncation(tail_tol=0.05)
    k = pairs_uniform(trunc)
    for x in (0.01, 1.0, 100.0, 1e6):
        assert expected_tail(x, k) <= trunc.tail_tol


def test_truncation_errors():
    with pytest.raises(ConfigurationError):
        LambdaTruncation(tail_tol=0.0)
    with pytest.raises(ConfigurationError):
        LambdaTruncation(max_pairs=0)
    with pytest.raises(ConfigurationError):
        sample_lambda(1.0, RngStream(1), 10, trunc=LambdaTruncation(tail_tol=1e-4, max_pairs=10))
    with pytest.raises(ConfigurationError):
        pairs_uniform(LambdaTruncation(tail_tol=1e-4, max_pairs=10))
    with pytest.raises(DomainError):
        sample_lambda(0.0, RngStream(1), 10)


def test_lambda_shares_leading_columns():
    # with no compensation, adding pairs only adds nonnegative terms
    off = LambdaTruncation(compensate=False)
    a = sample_lambda(1.0, RngStream(5), 2000, trunc=off, pairs=3)
    b = sample_lambda(1.0, RngStream(5), 2000, trunc=off, pairs=6)
    assert np.all(b >= a)


# -- weighted pairs ----------------------------------------------------------------------


def test_weight_mass(weighted_big):
    m, se = mean_se(weighted_big.weight)
    assert abs(m - 1.0) <= 3 * se


def test_weighted_support(weighted_big):
    ws = weighted_big
    assert len(ws) == BIG
    assert np.all(ws.u > 0.0)
    assert np.all((ws.theta > 0.0) & (ws.theta < ws.t))
    assert np.all(ws.weight > 0.0)


def test_weighted_tail_matches_mixture(weighted_big):
    ws = weighted_big
    m, se = mean_se(ws.weight * (ws.u > 0.5))
    assert abs(m - S.ustar_survival(0.5, 1.0, route="mixture").value) <= 3 * se


def test_weighted_horizon_scaling():
    a = sample_joint_weighted(1.0, RngStream(8), 5000)
    b = sample_joint_weighted(4.0, RngStream(8), 5000)
    np.testing.assert_allclose(b.u, 2.0 * a.u, rtol=1e-15)
    np.testing.assert_allclose(b.theta, 4.0 * a.theta, rtol=1e-15)
    np.testing.assert_array_equal(a.weight, b.weight)


def test_weighted_scalar_and_empty():
    s = sample_joint_weighted(1.0, RngStream(2))
    assert isinstance(s, WeightedSample) and 0.0 < s.theta < 1.0
    assert len(sample_joint_weighted(1.0, RngStream(2), 0)) == 0
    with pytest.raises(DomainError):
        sample_joint_weighted(0.0, RngStream(2), 10)


def test_thread_count_does_not_change_output():
    n = 3 * 2**16 + 17
    a = sample_joint_weighted(1.0, RngStream(SEED, 30), n, threads=1)
    b = sample_joint_weighted(1.0, RngStream(SEED, 30), n, threads=4)
    for col in ("u", "theta", "weight"):
        np.testing.assert_array_equal(getattr(a, col), getattr(b, col))
    np.testing.assert_array_equal(sample_xi(RngStream(1), n, threads=1), sample_xi(RngStream(1), n, threads=3))

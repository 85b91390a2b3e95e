import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from excursion.errors import DomainError
from excursion.lindley import (
    ExcursionRecord,
    StepDistribution,
    batch_simulate,
    excursion_stats,
    lindley_path,
    normalize,
)
from excursion.rng import RngStream, Var

from conftest import SEED

HAND = (1, -1, 1, 1, -1, -1, 1)


def brute_force(u):
    """Direct scan of every index, no shortcuts."""
    n = len(u) - 1
    g_n = max(k for k in range(n + 1) if u[k] == 0)
    ustar = max(u[k] for k in range(g_n + 1))
    if ustar == 0:
        return g_n, 0.0, g_n, g_n, g_n
    fstar = max(k for k in range(g_n + 1) if u[k] == ustar)
    gstar = max(k for k in range(fstar + 1) if u[k] == 0)
    dstar = min(k for k in range(fstar, n + 1) if u[k] == 0)
    return g_n, ustar, fstar, gstar, dstar


def prefix_min_form(steps):
    s = np.concatenate([[0.0], np.cumsum(steps)])
    return s - np.minimum.accumulate(s)


def test_hand_path():
    p = lindley_path(HAND)
    assert p.u.tolist() == [0, 1, 0, 1, 2, 1, 0, 1]
    r = excursion_stats(p)
    assert (r.g_n, r.ustar, r.fstar, r.gstar, r.dstar, r.thetastar) == (6, 2.0, 4, 2, 6, 2)
    assert not r.degenerate
    assert normalize(r, 7) == (2 / math.sqrt(7), 2 / 7)


def test_all_down_steps():
    p = lindley_path([-1.0] * 20)
    assert np.all(p.u == 0.0)


def test_all_up_steps_is_degenerate():
    r = excursion_stats(lindley_path([1.0] * 10))
    assert r.g_n == 0 and r.ustar == 0.0 and r.degenerate
    assert r.fstar == r.gstar == r.dstar == 0 and r.thetastar == 0
    assert normalize(r, 10) == (0.0, 0.0)


def test_last_attainer_convention():
    # two excursions of equal height: f* is the later one
    r = excursion_stats(lindley_path([1, -1, 1, -1, -1]))
    assert (r.ustar, r.fstar, r.gstar, r.dstar) == (1.0, 3, 2, 4)


def test_recursion_matches_prefix_min_on_gaussian_paths():
    rng = np.random.default_rng(SEED)
    for _ in range(1000):
        steps = rng.normal(size=512)
        np.testing.assert_allclose(lindley_path(steps).u, prefix_min_form(steps), rtol=0, atol=1e-11)


def test_stats_match_brute_force_on_rademacher_paths():
    rng = np.random.default_rng(SEED + 1)
    for _ in range(1000):
        steps = rng.choice([-1.0, 1.0], size=256)
        u = lindley_path(steps).u
        r = excursion_stats(lindley_path(steps))
        assert (r.g_n, r.ustar, r.fstar, r.gstar, r.dstar) == brute_force(u.tolist())


@given(st.lists(st.sampled_from([-1.0, 1.0]), min_size=1, max_size=120))
def test_stats_match_brute_force_property(steps):
    u = lindley_path(steps).u
    r = excursion_stats(lindley_path(steps))
    assert (r.g_n, r.ustar, r.fstar, r.gstar, r.dstar) == brute_force(u.tolist())


def test_record_invariants_on_many_paths():
    rng = np.random.default_rng(SEED + 2)
    for _ in range(10_000):
        n = int(rng.integers(1, 80))
        steps = rng.choice([-1.0, 1.0], size=n) if rng.uniform() < 0.5 else rng.normal(size=n)
        p = lindley_path(steps)
        r = excursion_stats(p)
        assert 0 <= r.gstar <= r.fstar <= r.dstar <= r.g_n <= n
        assert p.u[r.gstar] == 0.0 and p.u[r.dstar] == 0.0
        assert p.u[r.fstar] == r.ustar
        assert r.thetastar == r.fstar - r.gstar
        assert r.degenerate == (r.ustar == 0.0)
        assert np.all(p.u >= 0.0)
        x, y = normalize(r, n)
        assert x >= 0.0 and 0.0 <= y <= 1.0


def test_rademacher_values_are_integers():
    steps = StepDistribution.RADEMACHER.sample(RngStream(1), (5000,))
    u = lindley_path(steps).u
    assert np.array_equal(u, np.round(u))


def test_zero_iff_at_running_minimum():
    steps = np.random.default_rng(4).normal(size=2000)
    s = np.concatenate([[0.0], np.cumsum(steps)])
    at_min = s == np.minimum.accumulate(s)
    assert np.array_equal(lindley_path(steps).u == 0.0, at_min)


def test_self_concatenation_never_lowers_ustar():
    rng = np.random.default_rng(5)
    for _ in range(500):
        steps = rng.choice([-1.0, 1.0], size=int(rng.integers(1, 200)))
        a = excursion_stats(lindley_path(steps)).ustar
        b = excursion_stats(lindley_path(np.concatenate([steps, steps]))).ustar
        assert b >= a


@pytest.mark.parametrize("dist", list(StepDistribution))
def test_step_laws_are_standardized(dist):
    x = dist.sample(RngStream(SEED, 60), (10**6,))
    se = 1.0 / math.sqrt(x.size)
    assert abs(x.mean()) <= 3 * se
    # var of the sample variance is (m4 - 1) / N; m4 <= 3 for all three laws
    assert abs(x.var() - 1.0) <= 3 * math.sqrt(2.0) * se


def test_input_validation():
    with pytest.raises(DomainError):
        lindley_path([[1.0, -1.0]])
    with pytest.raises(DomainError):
        lindley_path([1.0, math.nan])
    with pytest.raises(DomainError):
        normalize(ExcursionRecord(0, 0.0, 0, 0, 0, 0, True), 0)
    with pytest.raises(DomainError):
        batch_simulate(StepDistribution.RADEMACHER, 0, 3, RngStream(1))
    with pytest.raises(DomainError):
        batch_simulate(StepDistribution.RADEMACHER, 4, 0, RngStream(1))


def test_batch_determinism_and_threads():
    a = batch_simulate("rademacher", 64, 3, RngStream(2))
    b = batch_simulate(StepDistribution.RADEMACHER, 64, 3, RngStream(2))
    np.testing.assert_array_equal(a.ustar, b.ustar)
    np.testing.assert_array_equal(a.theta, b.theta)
    c = batch_simulate("gaussian", 32, 1000, RngStream(3), threads=1)
    d = batch_simulate("gaussian", 32, 1000, RngStream(3), threads=4)
    np.testing.assert_array_equal(c.ustar, d.ustar)
    assert len(c) == 1000


def test_batch_length_one_is_always_degenerate():
    b = batch_simulate("rademacher", 1, 500, RngStream(4))
    assert np.all(b.ustar == 0.0) and np.all(b.theta == 0.0)
    assert b.degenerate_fraction == 1.0


def test_batch_matches_per_path_records():
    # batch output equals excursion_stats on the same steps
    rng = RngStream(9)
    b = batch_simulate("uniform", 50, 10, rng)
    base = RngStream(9).split()
    steps = StepDistribution.UNIFORM_CENTERED.sample(base.child(Var.CHUNK, 0).child(Var.STEPS), (10, 50))
    want = [normalize(excursion_stats(lindley_path(s)), 50) for s in steps]
    np.testing.assert_allclose(b.ustar, [w[0] for w in want], rtol=1e-14)
    np.testing.assert_array_equal(b.theta, [w[1] for w in want])


def test_degenerate_fraction_small_for_long_paths():
    b = batch_simulate("rademacher", 4096, 2000, RngStream(SEED, 61))
    assert b.degenerate_fraction < 0.05
    assert np.all((b.theta >= 0.0) & (b.theta <= 1.0))

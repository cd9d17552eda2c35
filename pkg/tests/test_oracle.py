import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import logsumexp

from spinglass.errors import CapabilityError, InvalidArgumentError, TruncationError
from spinglass.numerics import RngStream, goe_sample
from spinglass.oracle import (
    check_h_derivative,
    enumerate_gibbs,
    guerra_rs_bound_mc,
    log_partition,
    mutual_info_immse_check,
    pd_second_moment_mc,
    pd_weights,
    ppp_shift_invariance_mc,
    ppp_topk,
    walsh_hadamard,
)
from spinglass.sk import SkParams


def _naive(W, params, x0):
    n = len(x0)
    Y = W + params.lam / n * np.outer(x0, x0)
    states = np.array(list(itertools.product((-1.0, 1.0), repeat=n)))
    logw = np.array([0.5 * params.beta * s @ Y @ s + params.h * s @ x0 for s in states])
    p = np.exp(logw - logsumexp(logw))
    return logsumexp(logw), states, p


@given(st.integers(min_value=2, max_value=7), st.floats(0.0, 2.0), st.floats(0.0, 2.0), st.floats(0.0, 1.0), st.integers(0, 10**6))
@settings(max_examples=25)
def test_enumeration_matches_naive(n, beta, lam, h, seed):
    gen = np.random.default_rng(seed)
    W = goe_sample(n, gen)
    x0 = gen.choice([-1.0, 1.0], size=n)
    params = SkParams(beta, lam, h)
    logZ, states, p = _naive(W, params, x0)
    g = enumerate_gibbs(W, params, x0)
    assert g.logZ == pytest.approx(logZ, abs=1e-10)
    np.testing.assert_allclose(g.marginal_means, p @ states, atol=1e-12)
    np.testing.assert_allclose(g.correlations, (states * p[:, None]).T @ states, atol=1e-12)
    q = states @ states.T / n
    pq = np.outer(p, p)
    ref = np.array([pq[np.isclose(q, v)].sum() for v in g.overlap_values])
    np.testing.assert_allclose(g.overlap_hist, ref, atol=1e-12)


def test_walsh_hadamard_is_involution_up_to_scale():
    a = np.random.default_rng(0).standard_normal(64)
    np.testing.assert_allclose(walsh_hadamard(walsh_hadamard(a)) / 64, a, atol=1e-12)
    with pytest.raises(InvalidArgumentError):
        walsh_hadamard(np.ones(6))


def test_infinite_temperature_partition_function():
    n = 8
    assert log_partition(np.zeros((n, n)), SkParams(0.0), np.ones(n)) == pytest.approx(n * math.log(2), abs=1e-12)


def test_capability_limits():
    with pytest.raises(CapabilityError):
        enumerate_gibbs(np.zeros((21, 21)), SkParams(1.0), np.ones(21))
    with pytest.raises(CapabilityError):
        guerra_rs_bound_mc(19, 1.0, 2, RngStream(0))


@given(st.integers(0, 10**6))
@settings(max_examples=10)
def test_h_derivative_identity(seed):
    gen = np.random.default_rng(seed)
    n = 10
    x0 = gen.choice([-1.0, 1.0], size=n)
    assert check_h_derivative(goe_sample(n, gen), SkParams(1.2, 0.5, 0.3), x0) <= 1e-8


def test_guerra_bound_small():
    r = guerra_rs_bound_mc(10, 1.5, 40, RngStream(1))
    assert r.margin_in_se > -3


def test_immse_small():
    r = mutual_info_immse_check(6, 1.0, 300, RngStream(2))
    assert r.passed


def test_immse_rejects_small_lambda():
    with pytest.raises(InvalidArgumentError):
        mutual_info_immse_check(6, 1e-4, 10, RngStream(0))


def test_ppp_points_decreasing():
    s = ppp_topk(0.5, 1000, RngStream(3))
    assert np.all(np.diff(s.points) < 0)


@given(st.floats(min_value=0.1, max_value=0.9), st.integers(0, 10**6))
@settings(max_examples=20)
def test_pd_weights_form_a_distribution(m, seed):
    w = pd_weights(ppp_topk(m, 5000, RngStream(seed)), tol=1.0)
    assert np.all(w.weights > 0)
    assert np.all(np.diff(w.weights) <= 0)
    assert 0 < w.truncated_mass <= 1.0 + 1e-12


def test_pd_truncation_error():
    with pytest.raises(TruncationError):
        pd_weights(ppp_topk(0.95, 5, RngStream(4)), tol=1e-6)


def test_pd_second_moment_small():
    est, se = pd_second_moment_mc(0.5, 2000, 1000, RngStream(5))
    assert abs(est - 0.5) <= 3 * se


def test_ppp_shift_small():
    lhs, rhs, se = ppp_shift_invariance_mc(0.5, 1.0, 2000, 1000, RngStream(6))
    assert rhs == 0.25
    assert abs(lhs - rhs) <= 4 * se + 0.01


def test_ppp_maximum_law():
    m, reps = 0.5, 100_000
    gen = RngStream(7).generator()
    top = -np.log(m * gen.exponential(size=reps)) / m
    t = np.sort(top)
    cdf = np.exp(-np.exp(-m * t) / m)
    ks = np.max(np.maximum(np.arange(1, reps + 1) / reps - cdf, cdf - np.arange(reps) / reps))
    assert ks <= 0.01
    # The first point of ppp_topk has the same construction.
    assert ppp_topk(m, 1, RngStream(7)).points[0] == pytest.approx(top[0])


def test_ppp_mean_count_above_zero():
    m, reps = 0.5, 4000
    counts = np.array([np.sum(ppp_topk(m, 40, RngStream(8, r)).points >= 0) for r in range(reps)])
    # N([0, inf)) ~ Poisson(1/m); 40 points leave a negligible chance of truncation.
    assert abs(counts.mean() - 1 / m) <= 3 * counts.std(ddof=1) / math.sqrt(reps)


def test_shift_zero_marks():
    lhs, rhs, _ = ppp_shift_invariance_mc(0.6, 0.0, 500, 50, RngStream(9))
    assert rhs == 0.0
    assert lhs == pytest.approx(0.0, abs=1e-12)


def test_symmetric_marginals_vanish():
    n = 12
    g = enumerate_gibbs(goe_sample(n, RngStream(10)), SkParams(1.5), np.ones(n))
    assert np.max(np.abs(g.marginal_means)) <= 1e-14


def test_infinite_temperature_overlap_concentrates():
    n = 14
    g = enumerate_gibbs(np.zeros((n, n)), SkParams(0.0), np.ones(n))
    outside = g.overlap_hist[np.abs(g.overlap_values) > 4 / math.sqrt(n)].sum()
    assert outside <= 1e-3


def test_h_derivative_decoupled_spins():
    n, h = 9, 0.3
    assert check_h_derivative(np.zeros((n, n)), SkParams(0.0, 0.0, h), np.ones(n)) <= 1e-9
    g = enumerate_gibbs(np.zeros((n, n)), SkParams(0.0, 0.0, h), np.ones(n))
    np.testing.assert_allclose(g.marginal_means, math.tanh(h), atol=1e-14)


def test_guerra_equality_at_infinite_temperature():
    r = guerra_rs_bound_mc(10, 0.0, 3, RngStream(11))
    assert r.mean_phi_n == pytest.approx(math.log(2), abs=1e-14)
    assert r.bound == pytest.approx(math.log(2), abs=1e-14)


def test_immse_weak_signal_limit():
    # With an uninformative posterior the off-diagonal matrix error is 1 per entry.
    n = 8
    r = mutual_info_immse_check(n, 2e-3, 200, RngStream(12), step=1e-3)
    assert r.rhs == pytest.approx((n - 1) / n, abs=1e-3)
    assert r.passed

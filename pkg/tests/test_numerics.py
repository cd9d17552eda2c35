import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from spinglass.errors import BracketError, DomainError, InvalidArgumentError
from spinglass.numerics import (
    RngStream,
    find_root,
    gauss_hermite,
    goe_sample,
    log2cosh,
    minimize_scalar,
    semicircle_cdf,
    semicircle_omega,
    semicircle_stieltjes,
    sym_eigvals,
)

# Logarithmic potential values from 30-digit direct integration.
OMEGA_AT_HALF = -0.4375
OMEGA_AT_3 = 1.0353726669943646226886375753


def test_gauss_hermite_moments():
    rule = gauss_hermite(61)
    assert rule.expect(lambda g: np.ones_like(g)) == pytest.approx(1.0, abs=1e-14)
    assert rule.expect(lambda g: g**2) == pytest.approx(1.0, abs=1e-13)
    assert rule.expect(lambda g: g**4) == pytest.approx(3.0, abs=1e-12)
    assert abs(rule.expect(lambda g: g**3)) < 1e-13


@pytest.mark.parametrize("order", [5, 61, 401, 1601])
def test_gauss_hermite_large_orders_are_finite(order):
    rule = gauss_hermite(order)
    assert np.all(np.isfinite(rule.weights))
    assert rule.weights.sum() == pytest.approx(1.0, abs=1e-13)
    np.testing.assert_allclose(rule.nodes, -rule.nodes[::-1], atol=1e-12)


def test_gauss_hermite_matches_adaptive_quadrature():
    f = lambda g: log2cosh(1.3 * g + 0.2)
    ref = integrate.quad(lambda g: f(g) * math.exp(-g * g / 2) / math.sqrt(2 * math.pi), -40, 40, points=[0.0], epsabs=1e-13, limit=200)[0]
    assert gauss_hermite(201).expect(f) == pytest.approx(ref, abs=1e-10)


def test_gauss_hermite_rejects_bad_order():
    with pytest.raises(InvalidArgumentError):
        gauss_hermite(0)


def test_semicircle_omega_frozen_values():
    assert semicircle_omega(0.5) == pytest.approx(OMEGA_AT_HALF, abs=1e-14)
    assert semicircle_omega(3.0) == pytest.approx(OMEGA_AT_3, abs=1e-13)


@given(st.floats(min_value=2.05, max_value=20.0))
def test_omega_derivative_is_stieltjes(x):
    h = 1e-6
    d = (semicircle_omega(x + h) - semicircle_omega(x - h)) / (2 * h)
    assert d == pytest.approx(semicircle_stieltjes(x), abs=1e-6)


@given(st.floats(min_value=-10.0, max_value=10.0))
def test_omega_is_even(x):
    assert semicircle_omega(x) == pytest.approx(semicircle_omega(-x), abs=1e-12)


def test_stieltjes_inside_support_raises():
    with pytest.raises(DomainError):
        semicircle_stieltjes(1.0)


def test_semicircle_cdf_endpoints():
    assert semicircle_cdf(-2.0) == 0.0
    assert semicircle_cdf(2.0) == pytest.approx(1.0)
    assert semicircle_cdf(0.0) == pytest.approx(0.5)


def test_goe_variance_convention():
    n = 400
    W = goe_sample(n, RngStream(3))
    off = W[np.triu_indices(n, 1)]
    assert np.allclose(W, W.T)
    assert n * off.var() == pytest.approx(1.0, rel=0.02)
    assert n * np.diag(W).var() == pytest.approx(2.0, rel=0.2)
    ev = sym_eigvals(W).eigenvalues
    assert ev[-1] == pytest.approx(2.0, abs=0.15)


def test_rng_streams_are_reproducible_and_distinct():
    a = RngStream(7, stream_id=1).child(3).generator().standard_normal(5)
    b = RngStream(7, stream_id=1).child(3).generator().standard_normal(5)
    c = RngStream(7, stream_id=2).child(3).generator().standard_normal(5)
    np.testing.assert_array_equal(a, b)
    assert not np.allclose(a, c)


def test_sym_eigvals_rejects_asymmetric():
    with pytest.raises(InvalidArgumentError):
        sym_eigvals(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_find_root_and_bracket_error():
    assert find_root(lambda x: x * x - 2, (0, 2)) == pytest.approx(math.sqrt(2), abs=1e-14)
    with pytest.raises(BracketError):
        find_root(lambda x: x * x + 1, (0, 2))


def test_minimize_scalar():
    x, v = minimize_scalar(lambda x: (x - 0.3) ** 2 + 1, (0, 1))
    assert x == pytest.approx(0.3, abs=1e-8)
    assert v == pytest.approx(1.0, abs=1e-14)


@given(st.floats(min_value=-800, max_value=800))
def test_log2cosh_is_stable(x):
    val = log2cosh(x)
    assert np.isfinite(val)
    assert val >= abs(x)
    assert val <= abs(x) + math.log(2) + 1e-15

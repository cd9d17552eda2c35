import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spinglass.amp import (
    AmpState,
    NonlinearitySchedule,
    amp_step,
    bayes_se,
    empirical_vs_se,
    onsager_ablation,
    run_amp,
    run_bayes_amp,
    sample_instance,
    se_expectation,
    state_evolution,
)
from spinglass.errors import InvalidArgumentError
from spinglass.numerics import RngStream
from spinglass.sk import bayes_overlap

B_STAR_15 = 0.692294654948444404799251533568


def test_bayes_se_converges_to_fixed_point():
    # Contraction factor near 0.46 per step: 1e-6 accuracy needs about 23 steps.
    b = bayes_se(1.5, 0.1, 30)
    assert abs(b[-1] - B_STAR_15) <= 1e-6


def test_bayes_se_zero_is_fixed():
    assert bayes_se(2.0, 0.0, 5) == [0.0] * 6


@given(st.floats(min_value=0.0, max_value=3.0), st.floats(min_value=0.01, max_value=1.0))
@settings(max_examples=30)
def test_bayes_se_nishimori(lam, q0):
    # Started on the line a = lam q, the Bayes denoiser keeps it there.
    tr = state_evolution(lam, NonlinearitySchedule.bayes(lam), lam * q0, q0, 3)
    np.testing.assert_allclose(tr.a, lam * tr.q, atol=1e-8)


def test_state_evolution_generic_matches_scalar():
    lam = 1.5
    b = bayes_se(lam, 0.2, 5)
    tr = state_evolution(lam, NonlinearitySchedule.bayes(lam), lam * 0.2, 0.2, 5)
    np.testing.assert_allclose(tr.q, b, atol=1e-12)


def test_se_expectation_gaussian_moment():
    assert se_expectation(lambda x0, x: x * x, 0.7, 0.3) == pytest.approx(0.49 + 0.3, abs=1e-13)
    assert se_expectation(lambda x0, x: x0 * x, 0.7, 0.3) == pytest.approx(0.7, abs=1e-13)


def test_amp_step_onsager_term():
    Y = np.array([[0.0, 1.0], [1.0, 0.0]])
    f = lambda y: 2 * y
    df = lambda y: 2 * np.ones_like(y)
    s0 = AmpState(t=0, x_t=np.array([1.0, 0.0]))
    s1 = amp_step(s0, Y, f, df)
    np.testing.assert_allclose(s1.x_t, [0.0, 2.0])
    s2 = amp_step(s1, Y, f, df)
    np.testing.assert_allclose(s2.x_t, Y @ (2 * s1.x_t) - 2.0 * np.array([2.0, 0.0]))


def test_amp_step_dimension_check():
    with pytest.raises(InvalidArgumentError):
        amp_step(AmpState(0, np.zeros(3)), np.eye(2), np.tanh, np.tanh)


def test_null_start_is_sign_symmetric():
    # Zero is an unstable fixed point; flipping x0 flips the overlap sign, so
    # the replicate mean concentrates near zero.
    vals = []
    for r in range(20):
        inst = sample_instance(1000, 2.0, RngStream(3, r))
        vals.append(run_bayes_amp(inst, 0.0, 3, RngStream(4, r)).f_overlap[3])
    vals = np.array(vals)
    assert abs(vals.mean()) <= 3 * vals.std(ddof=1) / math.sqrt(len(vals)) + 1e-3


@pytest.mark.slow
def test_empirical_tracks_se_small():
    rep = empirical_vs_se(2000, 1.5, 0.3, 6, 12, RngStream(11))
    for key in ("overlap", "sqnorm", "tanh2"):
        assert np.all(rep.deviation[key] <= 4 * rep.std_error[key] + 0.01)


def test_onsager_ablation_direction():
    corrected, uncorrected = onsager_ablation(1500, 3, 3, RngStream(2))
    assert uncorrected > 3 * corrected


def test_empirical_vs_se_requires_large_n():
    with pytest.raises(InvalidArgumentError):
        empirical_vs_se(100, 1.5, 0.3, 3, 2, RngStream(0))


@pytest.mark.parametrize("lam", [1.2, 1.5, 2.0, 3.0])
def test_bayes_se_limit_equals_sk_bayes_point(lam):
    from spinglass.sk import SkParams, sk_solve_rs

    b = bayes_se(lam, 0.5, 400)[-1]
    assert b == pytest.approx(sk_solve_rs(SkParams(lam, lam)).q, abs=1e-8)


def test_se_null_and_subcritical():
    tr = state_evolution(0.0, NonlinearitySchedule.tanh(), 0.0, 1.0, 5)
    assert np.all(tr.a == 0.0)
    b = bayes_se(0.9, 0.01, 200)
    assert np.all(np.diff(b) < 0) and b[-1] < 1e-4


def test_bbp_top_eigenvalue():
    inst = sample_instance(2000, 3.0, RngStream(8))
    assert np.linalg.eigvalsh(inst.Y)[-1] == pytest.approx(3.0 + 1.0 / 3.0, abs=0.05)


def test_instance_is_deterministic():
    a = sample_instance(50, 1.0, RngStream(1, 2))
    b = sample_instance(50, 1.0, RngStream(1, 2))
    np.testing.assert_array_equal(a.Y, b.Y)


def test_constant_denoiser_first_step():
    inst = sample_instance(30, 1.0, RngStream(0))
    s1 = amp_step(AmpState(0, np.zeros(30)), inst.Y, lambda y: 2.0 * np.ones_like(y), np.zeros_like)
    np.testing.assert_allclose(s1.x_t, 2.0 * inst.Y @ np.ones(30))
    assert s1.onsager == 0.0


def test_null_iterates_stay_centered():
    n = 5000
    inst = sample_instance(n, 0.0, RngStream(6))
    s = AmpState(0, RngStream(7).generator().standard_normal(n))
    for _ in range(2):
        s = amp_step(s, inst.Y, np.tanh, lambda y: 1.0 / np.cosh(y) ** 2)
    assert abs(s.x_t.mean()) <= 3 / math.sqrt(n)

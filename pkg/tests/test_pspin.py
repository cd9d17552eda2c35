import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from spinglass.errors import DomainError, InvalidArgumentError, NoSolutionError
from spinglass.pspin import (
    PhaseLabel,
    PSpinParams,
    RsPoint,
    bayes_fixed_points,
    e_1rsb,
    extract_fs_fd_fstar,
    grad_psi_rs,
    gs_energy_1rsb,
    k2_phase,
    k2_rmt_free_energy,
    lambda_critical,
    lambda_spinodal,
    m_star,
    monasson_curve,
    monasson_zero_t,
    mse,
    mse_ml,
    psi_1rsb,
    psi_bayes,
    psi_rs,
    solve_rs,
    t_dynamic,
    t_static,
    zero_t_complexity,
)

# 30-digit values from an independent mpmath computation.
LAMBDA_C3 = 2.9554458959206255028681918851
E_STAR = {3: 1.17167477926528835838812354848, 4: 1.26860968945080902799710894789, 5: 1.33500970192989366059714087532}
MU_STAR3 = 0.88391292338929946784093576247
T_D3 = math.sqrt(3.0 / 8.0)
T_S3 = 0.586053972417363796965333834786


def test_lambda_critical_frozen():
    assert lambda_critical(3) == pytest.approx(LAMBDA_C3, abs=1e-9)


def test_spinodal_closed_form():
    assert lambda_spinodal(3) == pytest.approx(math.sqrt(8.0), abs=1e-14)
    assert lambda_spinodal(4) == pytest.approx(math.sqrt(6 * 27 / 4), abs=1e-12)


def test_bayes_fixed_points_merge_at_spinodal():
    lam = lambda_spinodal(3) * (1 + 1e-10)
    pts = bayes_fixed_points(lam, 3)
    assert len(pts) == 3
    assert pts[2] - pts[1] < 1e-4
    assert bayes_fixed_points(0.99 * lambda_spinodal(3), 3) == [0.0]


@given(st.floats(min_value=3.0, max_value=8.0), st.integers(min_value=3, max_value=6))
def test_bayes_fixed_points_solve_equation(lam, k):
    xi = lam**2 / math.factorial(k - 1)
    for b in bayes_fixed_points(lam, k):
        assert b == pytest.approx(xi * b ** (k - 1) / (1 + xi * b ** (k - 1)), abs=1e-10)


def test_psi_bayes_equal_at_lambda_c():
    lam = lambda_critical(3)
    b = bayes_fixed_points(lam, 3)[-1]
    assert psi_bayes(b, lam, 3) == pytest.approx(psi_bayes(0.0, lam, 3), abs=1e-10)


@given(
    st.integers(min_value=1, max_value=5),
    st.floats(min_value=0.0, max_value=3.0),
    st.floats(min_value=0.0, max_value=3.0),
    st.floats(min_value=-1.0, max_value=1.0),
    st.floats(min_value=0.0, max_value=0.95),
)
def test_grad_matches_finite_difference(k, beta, lam, b, q):
    p = PSpinParams(k=k, beta=beta, lam=lam)
    h = 1e-6
    db, dq = grad_psi_rs(RsPoint(b, q), p)
    fd_b = (psi_rs(RsPoint(b + h, q), p) - psi_rs(RsPoint(b - h, q), p)) / (2 * h)
    fd_q = (psi_rs(RsPoint(b, q + h), p) - psi_rs(RsPoint(b, q - h), p)) / (2 * h) if q > h else dq
    assert db == pytest.approx(fd_b, abs=1e-5)
    assert dq == pytest.approx(fd_q, rel=1e-5, abs=1e-5)


def test_psi_rs_domain():
    with pytest.raises(DomainError):
        psi_rs(RsPoint(0.0, 1.0), PSpinParams(k=2, beta=1.0))
    with pytest.raises(InvalidArgumentError):
        PSpinParams(k=0, beta=1.0)
    with pytest.raises(InvalidArgumentError):
        PSpinParams(k=2, beta=-1.0)


@given(st.floats(min_value=0.1, max_value=4.0), st.floats(min_value=0.0, max_value=4.0))
def test_solve_rs_is_stationary(beta, lam):
    p = PSpinParams(k=3, beta=beta, lam=lam)
    pt = solve_rs(p, "trivial")
    db, dq = grad_psi_rs(pt, p)
    assert abs(db) < 1e-7 and abs(dq) < 1e-7


def test_solve_rs_no_nontrivial_at_high_temperature():
    with pytest.raises(NoSolutionError):
        solve_rs(PSpinParams(k=3, beta=0.5), "nontrivial")


@pytest.mark.parametrize(
    "beta, lam, label",
    [(0.5, 0.5, PhaseLabel.PARAMAGNETIC), (2.0, 0.5, PhaseLabel.SPIN_GLASS), (2.0, 2.0, PhaseLabel.RECOVERY), (0.8, 1.5, PhaseLabel.RECOVERY)],
)
def test_k2_phase_labels(beta, lam, label):
    assert k2_phase(beta, lam)[0] is label


@given(st.floats(min_value=0.05, max_value=5.0), st.floats(min_value=0.0, max_value=5.0))
def test_k2_closed_form_is_rs_stationary(beta, lam):
    _, pt = k2_phase(beta, lam)
    assume(pt.q < 1.0)
    db, dq = grad_psi_rs(pt, PSpinParams(k=2, beta=beta, lam=lam))
    assert abs(db) < 1e-9 and abs(dq) < 1e-9


def test_k2_order_parameters_continuous_across_boundaries():
    for beta, lam in [(1.0 + 1e-9, 0.5), (2.0, 1.0 + 1e-9), (0.5, 2.0 + 1e-9)]:
        a = k2_phase(beta * (1 - 2e-9), lam * (1 - 2e-9))[1]
        b = k2_phase(beta, lam)[1]
        assert abs(a.q - b.q) < 1e-6 and abs(a.b - b.b) < 1e-4


def test_mse_limits():
    assert mse(0.5, 0.5) == pytest.approx(1.0)
    assert mse_ml(0.5) == 2.0
    assert mse_ml(1e6) == pytest.approx(0.0, abs=1e-10)
    assert mse(50.0, 50.0) < 0.05


@pytest.mark.parametrize("beta", [0.2, 0.4, 0.6, 0.8])
def test_rmt_free_energy(beta):
    assert k2_rmt_free_energy(beta) == pytest.approx(beta**2 / 4, abs=1e-12)


def test_t_dynamic_frozen_and_monotone():
    assert t_dynamic(1.0, 3) == pytest.approx(T_D3, abs=1e-12)
    ms = np.linspace(0.05, 1.0, 10)
    td = [t_dynamic(m, 3) for m in ms]
    assert np.all(np.diff(td) > 0)


def test_t_static_below_t_dynamic():
    ts = t_static(3)
    assert ts == pytest.approx(T_S3, abs=1e-10)
    assert 0 < ts < t_dynamic(1.0, 3)
    m, q1, psi = m_star(ts * 1.01, 3)
    assert m == 1.0 and q1 == 0.0
    m, q1, psi = m_star(ts * 0.9, 3)
    assert 0 < m < 1 and q1 > 0
    assert psi <= 1 / (ts * 0.9) ** 2 / 4 + 1e-12


def test_psi_1rsb_reduces_to_rs_at_m_one():
    assert psi_1rsb(0.7, 1.0, 2.3, 3) == pytest.approx(2.3**2 / 4, abs=1e-14)


@pytest.mark.parametrize("k", [3, 4, 5])
def test_ground_state_energy_frozen(k):
    mu, e = gs_energy_1rsb(k)
    assert e == pytest.approx(E_STAR[k], abs=1e-9)
    if k == 3:
        assert mu == pytest.approx(MU_STAR3, abs=1e-5)


@given(st.floats(min_value=0.1, max_value=10.0))
def test_e_1rsb_bounded_below_by_ground_state(mu):
    assert e_1rsb(mu, 3) >= E_STAR[3] - 1e-12


def test_monasson_curve_shape():
    curve = monasson_curve(0.3, 3)
    assert np.all(np.diff(curve.f) >= 0)
    f_s, f_d, f_star = extract_fs_fd_fstar(curve, 0.3)
    assert np.max(curve.sigma) > 0
    assert math.isnan(f_s) or f_s <= f_d + 1e-9


def test_monasson_zero_t_matches_legendre_dual():
    eps, sig = monasson_zero_t(1.5, 3)
    assert sig == pytest.approx(zero_t_complexity(eps, 3), abs=1e-4)

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spinglass.errors import DomainError, InvalidArgumentError
from spinglass.landscape import complexity_S, eps_d, eps_star, kac_rice_mc, log_prefactor, sup_complexity
from spinglass.numerics import RngStream
from spinglass.pspin import gs_energy_1rsb

E_STAR3 = 1.17167477926528835838812354848


def test_eps_star_frozen():
    assert eps_star(3) == pytest.approx(E_STAR3, abs=1e-10)
    assert complexity_S(eps_star(3), 3) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("k", [3, 4, 5])
def test_eps_star_matches_replica_ground_state(k):
    assert abs(eps_star(k) - gs_energy_1rsb(k)[1]) <= 1e-8


def test_sup_complexity_at_zero():
    # S(0) = Omega(0) + log(k-1)/2 + 1/2 = log(k-1)/2.
    assert sup_complexity(3) == pytest.approx(0.5 * math.log(2.0), abs=1e-12)


@given(st.integers(min_value=3, max_value=8), st.floats(min_value=-3.0, max_value=3.0))
def test_complexity_even_and_peaked(k, x):
    assert complexity_S(x, k) == pytest.approx(complexity_S(-x, k), abs=1e-12)
    assert complexity_S(x, k) <= complexity_S(0.0, k) + 1e-12


def test_eps_d_below_eps_star():
    for k in (3, 4, 5):
        assert 0 < eps_d(k) < eps_star(k)


def test_rejects_k_two():
    with pytest.raises(DomainError):
        complexity_S(0.0, 2)


def test_log_prefactor_small_n():
    n, k = 10, 3
    ref = math.log(((k - 1) * (n - 1) / 2) ** ((n - 1) / 2) * 2 * math.sqrt(math.pi) / math.gamma(n / 2))
    assert log_prefactor(n, k) == pytest.approx(ref, rel=1e-13)


def test_kac_rice_band_additivity():
    # Counts over disjoint bands add up to the full-line count. The integrand
    # has kinks at the eigenvalues, so the rules agree only to ~1e-4.
    n, k, reps = 40, 3, 20
    full = kac_rice_mc(n, (-np.inf, np.inf), k, reps, RngStream(1))
    lo = kac_rice_mc(n, (-4.0, 0.0), k, reps, RngStream(1))
    hi = kac_rice_mc(n, (0.0, 4.0), k, reps, RngStream(1))
    combined = np.logaddexp(n * lo.log_count_per_n, n * hi.log_count_per_n) / n
    assert combined == pytest.approx(full.log_count_per_n, abs=5e-4)


def test_kac_rice_validation():
    with pytest.raises(InvalidArgumentError):
        kac_rice_mc(5, (-1, 1), 3, 20, RngStream(0))
    with pytest.raises(InvalidArgumentError):
        kac_rice_mc(20, (1, -1), 3, 20, RngStream(0))

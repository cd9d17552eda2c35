"""Kac-Rice complexity of the pure-noise spherical p-spin landscape."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp

from .errors import DomainError, InvalidArgumentError
from .numerics import RngLike, as_generator, find_root, gauss_hermite, goe_sample, semicircle_omega

# Band endpoints beyond this magnitude are clipped; S(x) < -1 out there.
ENERGY_CUTOFF = 4.0


@dataclass(frozen=True)
class KacRiceEstimate:
    """Monte Carlo estimate of ``(1/n) log E[C_n(band)]``."""

    n: int
    band: tuple
    log_count_per_n: float
    std_error: float
    reps: int


def _check_k(k: int) -> None:
    if int(k) != k or k < 3:
        raise DomainError(f"complexity requires integer k >= 3, got {k}")


def complexity_S(x, k: int):
    """Annealed complexity of critical points at energy ``x``."""
    _check_k(k)
    x = np.asarray(x, dtype=float)
    out = semicircle_omega(x * math.sqrt(2.0 * k / (k - 1.0))) - x**2 + 0.5 * math.log(k - 1.0) + 0.5
    return out if np.ndim(out) else float(out)


def eps_d(k: int) -> float:
    """Energy at which the Hessian spectrum touches zero."""
    _check_k(k)
    return math.sqrt(2.0 * (k - 1.0) / k)


def eps_star(k: int) -> float:
    """Largest energy with non-negative complexity."""
    _check_k(k)
    return find_root(lambda x: complexity_S(x, k), (eps_d(k), ENERGY_CUTOFF))


def sup_complexity(k: int, band=(-ENERGY_CUTOFF, ENERGY_CUTOFF)) -> float:
    """Supremum of ``S`` over a band (the maximum sits at the even point 0 if included)."""
    xs = np.linspace(max(band[0], -ENERGY_CUTOFF), min(band[1], ENERGY_CUTOFF), 20001)
    return float(np.max(complexity_S(xs, k)))


def log_prefactor(n: int, k: int) -> float:
    """Logarithm of ``[(k-1)(n-1)/2]^{(n-1)/2} 2 sqrt(pi) / Gamma(n/2)``."""
    return 0.5 * (n - 1) * math.log((k - 1) * (n - 1) / 2.0) + math.log(2.0 * math.sqrt(math.pi)) - gammaln(n / 2.0)


def _normalize_band(band) -> tuple[float, float]:
    lo, hi = float(band[0]), float(band[1])
    if not lo < hi:
        raise InvalidArgumentError(f"empty energy band [{lo}, {hi}]")
    return max(lo, -ENERGY_CUTOFF), min(hi, ENERGY_CUTOFF)


def _z_rule(n: int, band: tuple[float, float], order: int):
    """Nodes in ``Z`` and log-weights for ``E[g(Z) 1{Z in sqrt(2n) band}]``."""
    lo, hi = band
    if lo <= -ENERGY_CUTOFF and hi >= ENERGY_CUTOFF:
        rule = gauss_hermite(order)
        keep = rule.weights > 0
        return rule.nodes[keep], np.log(rule.weights[keep])
    s = math.sqrt(2.0 * n)
    x, w = np.polynomial.legendre.leggauss(order)
    z = s * (0.5 * (hi - lo) * x + 0.5 * (hi + lo))
    logw = np.log(0.5 * (hi - lo) * s * w) - 0.5 * z * z - 0.5 * math.log(2.0 * math.pi)
    return z, logw


def kac_rice_mc(n: int, band, k: int, reps: int, rng: RngLike, order: int = 201, n_boot: int = 200) -> KacRiceEstimate:
    """Finite-n Monte Carlo estimate of the expected number of critical points.

    For each GOE(n-1) draw the Gaussian energy variable is integrated with a
    fixed quadrature rule. Draws are combined in log space and the standard
    error is obtained by bootstrap over draws.

    Args:
        n: Dimension of the sphere, at least 10.
        band: Energy interval ``(lo, hi)``; infinite ends are clipped to +-4.
        k: Tensor order, at least 3.
        reps: Number of GOE draws, at least 10.
        rng: Random stream; draw ``i`` uses substream ``i``.
        order: Quadrature order in the energy variable.
        n_boot: Bootstrap resamples for the standard error.
    """
    _check_k(k)
    if n < 10:
        raise InvalidArgumentError("kac_rice_mc requires n >= 10")
    if reps < 10:
        raise InvalidArgumentError("kac_rice_mc requires reps >= 10")
    b = _normalize_band(band)
    z, logw = _z_rule(n, b, order)
    t = math.sqrt(k / ((k - 1.0) * (n - 1.0)))
    shifts = t * z
    log_i = np.empty(reps)
    for r in range(reps):
        sub = rng.child(r) if hasattr(rng, "child") else rng
        lam = np.linalg.eigvalsh(goe_sample(n - 1, sub))
        gaps = np.maximum(np.abs(lam[None, :] - shifts[:, None]), 1e-300)
        log_i[r] = logsumexp(logw + np.log(gaps).sum(axis=1))
    pref = log_prefactor(n, k)
    est = (pref + logsumexp(log_i) - math.log(reps)) / n
    gen = as_generator(rng.child(reps) if hasattr(rng, "child") else rng)
    idx = gen.integers(0, reps, size=(n_boot, reps))
    boot = (pref + logsumexp(log_i[idx], axis=1) - math.log(reps)) / n
    return KacRiceEstimate(n=n, band=(float(band[0]), float(band[1])), log_count_per_n=float(est), std_error=float(np.std(boot, ddof=1)), reps=reps)

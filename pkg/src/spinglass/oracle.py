"""Ground-truth checks: exact enumeration, identity tests and Poisson process samplers."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .errors import CapabilityError, InvalidArgumentError, TruncationError
from .numerics import RngLike, as_generator, goe_sample
from .sk import SkParams, sk_rs_min_over_q

ENUM_MAX_N = 20
_CHUNK = 1 << 15
_FIELD_CLIP = 1.0 - 1e-12


@dataclass(frozen=True)
class EnumeratedGibbs:
    """Exact summaries of ``mu(s) ~ exp(beta/2 <Y, s s^T> + h <s, x0>)``.

    Attributes:
        logZ: Log partition function, diagonal of ``Y`` included.
        marginal_means: ``<s_i>``.
        correlations: ``<s_i s_j>`` as an ``(n, n)`` matrix.
        effective_fields: ``atanh(<s_i>) / beta``; +-inf where ``|<s_i>| > 1 - 1e-12``.
        overlap_values: Support ``1 - 2k/n`` for ``k = 0..n``.
        overlap_hist: Law of ``(1/n) <s1, s2>`` for two independent replicas.
    """

    n: int
    logZ: float
    marginal_means: np.ndarray
    correlations: np.ndarray
    effective_fields: np.ndarray
    overlap_values: np.ndarray
    overlap_hist: np.ndarray


def _spin_block(start: int, stop: int, n: int) -> np.ndarray:
    codes = np.arange(start, stop, dtype=np.int64)
    bits = (codes[:, None] >> np.arange(n)[None, :]) & 1
    return 1.0 - 2.0 * bits


def _log_weights(Y: np.ndarray, x0: np.ndarray, beta: float, h: float) -> np.ndarray:
    n = len(x0)
    out = np.empty(1 << n)
    for s in range(0, 1 << n, _CHUNK):
        S = _spin_block(s, min(s + _CHUNK, 1 << n), n)
        out[s : s + len(S)] = 0.5 * beta * np.einsum("ij,ij->i", S @ Y, S) + h * (S @ x0)
    return out


def walsh_hadamard(a: np.ndarray) -> np.ndarray:
    """Unnormalized fast Walsh-Hadamard transform of a length-``2^n`` vector."""
    a = np.array(a, dtype=float)
    size = len(a)
    if size & (size - 1):
        raise InvalidArgumentError("length must be a power of two")
    h = 1
    while h < size:
        v = a.reshape(-1, 2, h)
        a = np.stack([v[:, 0] + v[:, 1], v[:, 0] - v[:, 1]], axis=1).reshape(-1)
        h *= 2
    return a


def _popcount(codes: np.ndarray, n: int) -> np.ndarray:
    return ((codes[:, None] >> np.arange(n)[None, :]) & 1).sum(axis=1)


def enumerate_gibbs(W, params: SkParams, x0) -> EnumeratedGibbs:
    """Exact Gibbs summaries for ``Y = (lam/n) x0 x0^T + W`` by visiting all ``2^n`` states.

    The overlap law uses ``P(q) = sum_z r(z) 1{popcount(z) = n(1-q)/2}`` where
    ``r(z) = sum_s p(s) p(s xor z)`` is obtained from the Walsh-Hadamard
    transform of the state probabilities.

    Raises:
        CapabilityError: If ``n > 20``.
    """
    W = np.asarray(W, dtype=float)
    x0 = np.asarray(x0, dtype=float)
    n = len(x0)
    if n > ENUM_MAX_N:
        raise CapabilityError(f"enumeration supports n <= {ENUM_MAX_N}, got {n}")
    if W.shape != (n, n):
        raise InvalidArgumentError("W and x0 dimensions differ")
    Y = W + (params.lam / n) * np.outer(x0, x0)
    logw = _log_weights(Y, x0, params.beta, params.h)
    logZ = float(logsumexp(logw))
    p = np.exp(logw - logZ)
    means = np.zeros(n)
    corr = np.zeros((n, n))
    for s in range(0, 1 << n, _CHUNK):
        S = _spin_block(s, min(s + _CHUNK, 1 << n), n)
        ps = p[s : s + len(S)]
        means += ps @ S
        corr += (S * ps[:, None]).T @ S
    r = walsh_hadamard(walsh_hadamard(p) ** 2) / (1 << n)
    k = _popcount(np.arange(1 << n, dtype=np.int64), n)
    hist = np.bincount(k, weights=np.maximum(r, 0.0), minlength=n + 1)
    hist = hist / hist.sum()
    clipped = np.clip(means, -_FIELD_CLIP, _FIELD_CLIP)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        fields = np.where(np.abs(means) > _FIELD_CLIP, np.sign(means) * np.inf, np.arctanh(clipped))
        fields = fields / params.beta if params.beta > 0 else np.full(n, np.nan)
    return EnumeratedGibbs(
        n=n,
        logZ=logZ,
        marginal_means=means,
        correlations=corr,
        effective_fields=fields,
        overlap_values=1.0 - 2.0 * np.arange(n + 1) / n,
        overlap_hist=hist,
    )


def log_partition(W, params: SkParams, x0) -> float:
    """``log Z`` only; cheaper than ``enumerate_gibbs``."""
    x0 = np.asarray(x0, dtype=float)
    n = len(x0)
    if n > ENUM_MAX_N:
        raise CapabilityError(f"enumeration supports n <= {ENUM_MAX_N}, got {n}")
    Y = np.asarray(W, dtype=float) + (params.lam / n) * np.outer(x0, x0)
    return float(logsumexp(_log_weights(Y, x0, params.beta, params.h)))


def check_h_derivative(W, params: SkParams, x0, step: float = 1e-5) -> float:
    """``|d/dh (1/n) log Z - (1/n) sum_i x0_i <s_i>|`` with a central difference in ``h``."""
    x0 = np.asarray(x0, dtype=float)
    n = len(x0)
    if n > 16:
        raise CapabilityError("check_h_derivative supports n <= 16")
    Y = np.asarray(W, dtype=float) + (params.lam / n) * np.outer(x0, x0)
    # The weight is analytic in h, so the lower point may sit at negative h.
    logz = [float(logsumexp(_log_weights(Y, x0, params.beta, params.h + s))) for s in (step, -step)]
    fd = (logz[0] - logz[1]) / (2.0 * step * n)
    g = enumerate_gibbs(W, params, x0)
    return float(abs(fd - float(x0 @ g.marginal_means) / n))


@dataclass(frozen=True)
class GuerraResult:
    mean_phi_n: float
    std_error: float
    bound: float
    margin_in_se: float


def guerra_rs_bound_mc(n: int, beta: float, reps: int, rng: RngLike) -> GuerraResult:
    """Monte Carlo mean of ``(1/n) log Z_n`` at zero signal versus ``min_q Psi_RS(q)``.

    ``margin_in_se = (bound - mean) / SE``; the bound holds in expectation, so
    the margin should exceed -3.
    """
    if n > 18:
        raise CapabilityError("guerra_rs_bound_mc supports n <= 18")
    params = SkParams(beta=beta)
    x0 = np.ones(n)
    vals = np.empty(reps)
    for r in range(reps):
        sub = rng.child(r) if hasattr(rng, "child") else rng
        vals[r] = log_partition(goe_sample(n, sub), params, x0) / n
    mean = float(vals.mean())
    se = float(vals.std(ddof=1) / math.sqrt(reps)) if reps > 1 else 0.0
    _, bound = sk_rs_min_over_q(beta)
    margin = (bound - mean) / se if se > 0 else (math.inf if bound >= mean - 1e-12 else -math.inf)
    return GuerraResult(mean, se, float(bound), float(margin))


@dataclass(frozen=True)
class ImmseResult:
    lhs: float
    rhs: float
    se: float

    @property
    def passed(self) -> bool:
        return abs(self.lhs - self.rhs) <= 3.0 * self.se


def mutual_info_immse_check(n: int, lam: float, reps: int, rng, step: float = 1e-3) -> ImmseResult:
    """Monte Carlo check of ``(2/(n lam)) dI/dlam = (1/n^2) sum_{i != j} E(<s_i s_j> - x_i x_j)^2``.

    ``I(lam) = E[lam/2 <Y, x0 x0^T> - log Z(Y) + n log 2]`` with ``Z`` the
    Bayes-line partition function (``beta = lam``). The derivative is taken
    per replicate along ``Y = (lam/n) x0 x0^T + W`` with ``W`` and ``x0``
    held fixed, which differentiates the expectation exactly. The standard
    error is that of the paired per-replicate differences.
    """
    if n > 12:
        raise CapabilityError("mutual_info_immse_check supports n <= 12")
    if lam <= step:
        raise InvalidArgumentError("lam must exceed the finite-difference step")
    lhs = np.empty(reps)
    rhs = np.empty(reps)
    off = ~np.eye(n, dtype=bool)
    for r in range(reps):
        gen = as_generator(rng.child(r) if hasattr(rng, "child") else rng)
        x0 = gen.choice(np.array([-1.0, 1.0]), size=n)
        W = goe_sample(n, gen)

        def info(lv):
            Y = W + (lv / n) * np.outer(x0, x0)
            return 0.5 * lv * float(x0 @ Y @ x0) - log_partition(Y, SkParams(beta=lv), x0) + n * math.log(2.0)

        dI = (info(lam + step) - info(lam - step)) / (2.0 * step)
        lhs[r] = 2.0 * dI / (n * lam)
        g = enumerate_gibbs(W, SkParams(beta=lam, lam=lam), x0)
        err = g.correlations - np.outer(x0, x0)
        rhs[r] = float(np.sum(err[off] ** 2)) / n**2
    diff = lhs - rhs
    se = float(diff.std(ddof=1) / math.sqrt(reps))
    return ImmseResult(float(lhs.mean()), float(rhs.mean()), se)


# ---------------------------------------------------------------------------
# Poisson point processes


@dataclass(frozen=True)
class PppSample:
    """Top ``K`` points, in decreasing order, of a PPP with intensity ``exp(-m x) dx``.

    ``gamma_last`` is the arrival time ``Gamma_K`` used for tail estimates.
    """

    m: float
    points: np.ndarray
    gamma_last: float


@dataclass(frozen=True)
class PdWeights:
    weights: np.ndarray
    truncated_mass: float


def _check_m(m: float) -> None:
    if not 0.0 < m < 1.0:
        raise InvalidArgumentError(f"m must lie in (0, 1), got {m}")


def _ppp_points(m: float, gammas: np.ndarray) -> np.ndarray:
    # N([t, inf)) has mean e^{-mt}/m, so the j-th largest point is -(1/m) log(m Gamma_j).
    return -np.log(m * gammas) / m


def ppp_topk(m: float, K: int, rng: RngLike) -> PppSample:
    """Ordered top ``K`` points via partial sums of unit exponentials."""
    _check_m(m)
    if K < 1:
        raise InvalidArgumentError("K must be at least 1")
    gammas = np.cumsum(as_generator(rng).exponential(size=K))
    return PppSample(m=m, points=_ppp_points(m, gammas), gamma_last=float(gammas[-1]))


def _tail_moments(m: float, gamma_last):
    # Points beyond the K-th form a PPP in Gamma > Gamma_K; campbell's formula
    # gives the mean and variance of sum e^{x} over them.
    a = 1.0 / m
    mean = m ** (-a) * gamma_last ** (1.0 - a) / (a - 1.0)
    var = m ** (-2.0 * a) * gamma_last ** (1.0 - 2.0 * a) / (2.0 * a - 1.0)
    return mean, var


def pd_weights(sample: PppSample, tol: float = 1e-2) -> PdWeights:
    """Poisson-Dirichlet weights ``e^{x_j} / sum_i e^{x_i}`` from a truncated sample.

    The sum over the ``e^{x_i}`` beyond the truncation is replaced by its
    conditional expectation given ``Gamma_K``. ``truncated_mass`` is the
    share of the total carried by the ``K`` explicit points.

    Raises:
        TruncationError: If the standard deviation of the neglected tail
            exceeds ``tol`` times the total.
    """
    x = sample.points
    top = x[0]
    e = np.exp(x - top)
    tail_mean, tail_var = _tail_moments(sample.m, sample.gamma_last)
    scale = math.exp(-top)
    total = e.sum() + tail_mean * scale
    if math.sqrt(tail_var) * scale > tol * total:
        raise TruncationError("too few points: tail fluctuation exceeds tolerance; increase K")
    w = e / total
    return PdWeights(weights=w, truncated_mass=float(w.sum()))


def _gamma_blocks(m, K, reps, gen, block):
    for start in range(0, reps, block):
        b = min(block, reps - start)
        yield np.cumsum(gen.exponential(size=(b, K)), axis=1)


def pd_second_moment_mc(m: float, K: int, reps: int, rng: RngLike, block: int = 200) -> tuple[float, float]:
    """Monte Carlo ``E[sum_j w_j^2]`` with standard error; the limit is ``1 - m``."""
    _check_m(m)
    gen = as_generator(rng)
    vals = []
    for gam in _gamma_blocks(m, K, reps, gen, block):
        for row in gam:
            w = pd_weights(PppSample(m, _ppp_points(m, row), float(row[-1]))).weights
            vals.append(float(w @ w))
    vals = np.array(vals)
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(len(vals)))


def ppp_shift_invariance_mc(m: float, mark_sigma: float, K: int, reps: int, rng: RngLike, block: int = 200):
    """Monte Carlo of ``E log sum e^{x+D} - E log sum e^{x}`` against ``m sigma^2 / 2``.

    Marks are i.i.d. ``N(0, sigma^2)``. Both sums share the same points, and
    the tail beyond ``K`` enters through its conditional mean (multiplied by
    ``E e^D`` for the marked sum).

    Returns:
        ``(lhs, rhs, se)``.
    """
    _check_m(m)
    gen = as_generator(rng)
    diffs = []
    mgf = math.exp(0.5 * mark_sigma**2)
    for gam in _gamma_blocks(m, K, reps, gen, block):
        x = _ppp_points(m, gam)
        d = mark_sigma * gen.standard_normal(x.shape)
        tail, _ = _tail_moments(m, gam[:, -1])
        top = x[:, :1]
        base = np.log(np.exp(x - top).sum(axis=1) + tail * np.exp(-top[:, 0])) + top[:, 0]
        xm = x + d
        topm = xm.max(axis=1, keepdims=True)
        marked = np.log(np.exp(xm - topm).sum(axis=1) + mgf * tail * np.exp(-topm[:, 0])) + topm[:, 0]
        diffs.append(marked - base)
    diffs = np.concatenate(diffs)
    return float(diffs.mean()), 0.5 * m * mark_sigma**2, float(diffs.std(ddof=1) / math.sqrt(len(diffs)))

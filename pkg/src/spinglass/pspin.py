"""Spherical p-spin / spiked tensor replica computations.

Covers the replica-symmetric functional and its stationary points, the k=2
phase diagram, the Bayes line thresholds, the one-step RSB functional at
zero signal, its zero-temperature limit and the complexity curve obtained by
Legendre duality in the Parisi parameter ``m``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InvalidArgumentError, NoSolutionError
from .numerics import find_root, minimize_scalar, semicircle_omega


@dataclass(frozen=True)
class PSpinParams:
    """Model parameters.

    Attributes:
        k: Tensor order, at least 1.
        beta: Inverse temperature.
        lam: Signal-to-noise ratio.
        h: Symmetry-breaking field along the planted direction.
    """

    k: int
    beta: float
    lam: float = 0.0
    h: float = 0.0

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise InvalidArgumentError(f"k must be an integer >= 1, got {self.k}")
        for name in ("beta", "lam", "h"):
            if getattr(self, name) < 0:
                raise InvalidArgumentError(f"{name} must be non-negative")

    @property
    def signal_coef(self) -> float:
        """Coefficient of ``b**k`` in the functional."""
        return self.beta * self.lam / math.sqrt(2.0 * math.factorial(self.k))


@dataclass(frozen=True)
class RsPoint:
    """Replica-symmetric order parameters (signal overlap ``b``, self overlap ``q``)."""

    b: float
    q: float


@dataclass(frozen=True)
class OneRsbPoint:
    b: float
    q0: float
    q1: float
    m: float


class PhaseLabel(str, enum.Enum):
    PARAMAGNETIC = "P"
    SPIN_GLASS = "SG"
    RECOVERY = "R"


@dataclass
class ComplexityCurve:
    """Parametric complexity curve ``m -> (f(m), Sigma(m))``.

    Attributes:
        samples: ``(f, sigma)`` pairs sorted by increasing ``f``.
        temperature: Temperature ``T = 1 / beta``.
        m: Parisi parameter of each sample, aligned with ``samples``.
        m_min: Lower end ``m(T)`` of the admissible range.
    """

    samples: list
    temperature: float
    m: list = field(default_factory=list)
    m_min: float = 0.0

    @property
    def f(self) -> np.ndarray:
        return np.array([s[0] for s in self.samples])

    @property
    def sigma(self) -> np.ndarray:
        return np.array([s[1] for s in self.samples])


# ---------------------------------------------------------------------------
# Replica-symmetric functional
# ---------------------------------------------------------------------------


def _check_q(q: float) -> None:
    if not q < 1.0:
        raise DomainError(f"self overlap must satisfy q < 1, got {q}")


def psi_rs(point: RsPoint, params: PSpinParams) -> float:
    """Replica-symmetric free-energy functional ``Psi_RS(b, q)``.

    Raises:
        DomainError: If ``q >= 1``.
    """
    b, q = point.b, point.q
    _check_q(q)
    k, beta = params.k, params.beta
    return (
        params.h * b
        + params.signal_coef * b**k
        + beta**2 / 4.0 * (1.0 - q**k)
        - b * b / (2.0 * (1.0 - q))
        + q / (2.0 * (1.0 - q))
        + 0.5 * math.log1p(-q)
    )


def grad_psi_rs(point: RsPoint, params: PSpinParams) -> tuple[float, float]:
    """Analytic partial derivatives ``(dPsi/db, dPsi/dq)``."""
    b, q = point.b, point.q
    _check_q(q)
    k, beta, lam = params.k, params.beta, params.lam
    c = beta * lam * math.sqrt(k / (2.0 * math.factorial(k - 1)))
    bk1 = 1.0 if k == 1 else b ** (k - 1)
    qk1 = 1.0 if k == 1 else q ** (k - 1)
    db = params.h + c * bk1 - b / (1.0 - q)
    dq = -k * beta**2 / 4.0 * qk1 - b * b / (2.0 * (1.0 - q) ** 2) + q / (2.0 * (1.0 - q) ** 2)
    return db, dq


def _rs_stationary_points(params: PSpinParams) -> list[RsPoint]:
    """All stationary points with ``b >= 0`` found by a scan in ``q``.

    Stationarity in ``q`` gives ``b**2 = B(q)``; stationarity in ``b`` is then a
    scalar equation in ``q``. Points with ``b = 0`` (possible when ``h = 0``
    and ``k >= 2``) are the zeros of ``B`` itself.
    """
    k, beta, h = params.k, params.beta, params.h
    c = beta * params.lam * math.sqrt(k / (2.0 * math.factorial(k - 1)))

    def big_b(q):
        qk1 = 1.0 if k == 1 else q ** (k - 1)
        return q - k * beta**2 / 2.0 * qk1 * (1.0 - q) ** 2

    def resid(q):
        # db / b for b = sqrt(B(q)) > 0
        b = math.sqrt(big_b(q))
        bk2 = b ** (k - 2) if k >= 2 else 1.0 / b
        return h / b + c * bk2 - 1.0 / (1.0 - q)

    grid = np.unique(np.concatenate([np.linspace(0.0, 0.99, 4001), 1.0 - np.logspace(-2, -13, 1101)]))
    bvals = np.array([big_b(q) for q in grid])
    out: list[RsPoint] = []

    if h == 0.0 and k >= 2:
        out.append(RsPoint(0.0, 0.0))
        for i in range(1, len(grid) - 1):
            lo, hi = grid[i], grid[i + 1]
            if bvals[i] == 0.0 or bvals[i] * bvals[i + 1] < 0:
                q = lo if bvals[i] == 0.0 else find_root(big_b, (lo, hi))
                if q > 0:
                    out.append(RsPoint(0.0, q))

    pos = bvals > 0
    vals = np.full(len(grid), np.nan)
    with np.errstate(all="ignore"):
        for i in np.flatnonzero(pos):
            vals[i] = resid(grid[i])
    for i in range(len(grid) - 1):
        if pos[i] and pos[i + 1] and vals[i] * vals[i + 1] <= 0 and np.isfinite(vals[i] * vals[i + 1]):
            q = grid[i] if vals[i] == 0 else find_root(resid, (grid[i], grid[i + 1]))
            out.append(RsPoint(math.sqrt(big_b(q)), q))

    uniq: list[RsPoint] = []
    for p in sorted(out, key=lambda p: (p.q, p.b)):
        if not uniq or abs(p.q - uniq[-1].q) > 1e-12 or abs(p.b - uniq[-1].b) > 1e-12:
            uniq.append(p)
    return uniq


def solve_rs(params: PSpinParams, branch: str = "nontrivial") -> RsPoint:
    """Stationary point of ``Psi_RS`` on the requested branch.

    Args:
        params: Model parameters.
        branch: ``"trivial"`` for the continuation of ``(0, 0)`` (the
            smallest-``q`` stationary point) or ``"nontrivial"`` for the
            stationary point with the largest ``q > 0``.

    Raises:
        NoSolutionError: If no nontrivial stationary point exists.
        InvalidArgumentError: For an unknown branch name.
    """
    if branch not in ("trivial", "nontrivial"):
        raise InvalidArgumentError(f"unknown branch {branch!r}")
    pts = _rs_stationary_points(params)
    if branch == "trivial":
        if not pts:
            raise NoSolutionError("no stationary point found")
        return pts[0]
    nontriv = [p for p in pts if p.q > 0.0]
    if not nontriv:
        raise NoSolutionError(f"no nontrivial RS stationary point for {params}")
    return nontriv[-1]


# ---------------------------------------------------------------------------
# k = 2 phase diagram
# ---------------------------------------------------------------------------


def k2_phase(beta: float, lam: float) -> tuple[PhaseLabel, RsPoint]:
    """Phase and closed-form order parameters of the spiked matrix model."""
    if beta < 0 or lam < 0:
        raise InvalidArgumentError("beta and lambda must be non-negative")
    if beta < 1.0 and lam * beta < 1.0:
        return PhaseLabel.PARAMAGNETIC, RsPoint(0.0, 0.0)
    if beta >= 1.0 and lam < 1.0:
        return PhaseLabel.SPIN_GLASS, RsPoint(0.0, 1.0 - 1.0 / beta)
    q = 1.0 - 1.0 / (beta * lam)
    b = math.sqrt(max(0.0, (1.0 - 1.0 / lam**2) * q))
    return PhaseLabel.RECOVERY, RsPoint(b, q)


def mse_ml(lam: float) -> float:
    """Asymptotic vector error of the top eigenvector estimator."""
    return 2.0 - 2.0 * math.sqrt(max(0.0, 1.0 - 1.0 / lam**2)) if lam > 0 else 2.0


def mse(beta: float, lam: float) -> float:
    """Asymptotic vector error ``1 - 2b + q`` of the Gibbs mean estimator."""
    _, p = k2_phase(beta, lam)
    return 1.0 - 2.0 * p.b + p.q


def k2_rmt_free_energy(beta: float) -> float:
    """Free energy of the pure-noise spherical k=2 model from the semicircle law.

    Valid for ``0 < beta < 1``, where it should reproduce ``beta**2 / 4``.
    """
    if not 0.0 < beta < 1.0:
        raise DomainError("RMT formula requires 0 < beta < 1")
    z = beta + 1.0 / beta
    return -0.5 * math.log(beta) + 0.5 * beta * z - 0.5 - 0.5 * semicircle_omega(z)


# ---------------------------------------------------------------------------
# Bayes line and pure-noise spinodal
# ---------------------------------------------------------------------------


def bayes_beta(lam: float, k: int) -> float:
    """Inverse temperature of the Bayes-optimal posterior."""
    return lam * math.sqrt(2.0 / math.factorial(k))


def psi_bayes(b: float, lam: float, k: int) -> float:
    """Reduced functional on the Bayes line ``b = q``."""
    return lam**2 / (2.0 * math.factorial(k)) * (1.0 + b**k) + b / 2.0 + 0.5 * math.log1p(-b)


def _xi(lam: float, k: int) -> float:
    return lam**2 / math.factorial(k - 1)


def bayes_fixed_points(lam: float, k: int) -> list[float]:
    """Solutions in ``[0, 1)`` of ``b = xi b^{k-1} / (1 + xi b^{k-1})``.

    Returns ``[0]`` below the spinodal and ``[0, b_unst, b_R]`` above it. At
    the spinodal the two nonzero roots coincide.
    """
    if k < 3:
        raise DomainError("Bayes fixed-point structure requires k >= 3")
    if lam < 0:
        raise InvalidArgumentError("lambda must be non-negative")
    xi = _xi(lam, k)
    # Nonzero roots solve g(b) = xi b^{k-2} (1 - b) = 1.
    g = lambda b: xi * b ** (k - 2) * (1.0 - b) - 1.0
    b_top = (k - 2.0) / (k - 1.0)
    gtop = g(b_top)
    if abs(gtop) <= 1e-12:
        return [0.0, b_top, b_top]
    if gtop < 0:
        return [0.0]
    return [0.0, find_root(g, (0.0, b_top)), find_root(g, (b_top, 1.0))]


def lambda_spinodal(k: int) -> float:
    """Signal strength at which the recovery fixed point first appears."""
    if k < 3:
        raise DomainError("spinodal defined for k >= 3")
    xi_s = (k - 1.0) ** (k - 1) / (k - 2.0) ** (k - 2)
    return math.sqrt(math.factorial(k - 1) * xi_s)


def lambda_critical(k: int) -> float:
    """Signal strength where the recovery and null fixed points exchange stability."""
    lam_s = lambda_spinodal(k)

    def delta(lam):
        b = bayes_fixed_points(lam, k)[-1]
        return psi_bayes(b, lam, k) - psi_bayes(0.0, lam, k)

    lo = lam_s * (1.0 + 1e-9)
    hi = 1.1 * lam_s
    while delta(hi) < 0:
        hi *= 1.1
    return find_root(delta, (lo, hi))


def beta_spinodal_rs(k: int) -> float:
    """Inverse temperature where the pure-noise RS fixed point with ``q > 0`` appears.

    Obtained by maximizing ``q^{k-2} (1-q)^2`` in the fixed-point equation
    ``q^{k-2} (1-q)^2 = 2 / (k beta^2)``.
    """
    if k < 3:
        raise DomainError("spinodal defined for k >= 3")
    return math.sqrt(k ** (k - 1) / (2.0 * (k - 2.0) ** (k - 2)))


# ---------------------------------------------------------------------------
# One-step RSB at zero signal
# ---------------------------------------------------------------------------


def psi_1rsb_general(point: OneRsbPoint, params: PSpinParams) -> float:
    """One-step RSB functional with signal overlap ``b`` and two self overlaps."""
    b, q0, q1, m = point.b, point.q0, point.q1, point.m
    if not (0.0 <= q0 <= q1 < 1.0) or not (0.0 < m <= 1.0):
        raise DomainError(f"invalid 1RSB point {point}")
    k, beta = params.k, params.beta
    d = 1.0 - (1.0 - m) * q1 - m * q0
    return (
        params.h * b
        + params.signal_coef * b**k
        + beta**2 / 4.0 * (1.0 - (1.0 - m) * q1**k - m * q0**k)
        + 0.5 * (q0 - b * b) / d
        + math.log(d) / (2.0 * m)
        - (1.0 - m) / (2.0 * m) * math.log1p(-q1)
    )


def psi_1rsb(q1: float, m: float, beta: float, k: int) -> float:
    """One-step RSB functional at ``b = q0 = 0``."""
    if not 0.0 <= q1 < 1.0:
        raise DomainError(f"q1 must lie in [0, 1), got {q1}")
    if not 0.0 < m <= 1.0:
        raise DomainError(f"m must lie in (0, 1], got {m}")
    return (
        beta**2 / 4.0 * (1.0 - (1.0 - m) * q1**k)
        + math.log1p(-(1.0 - m) * q1) / (2.0 * m)
        - (1.0 - m) / (2.0 * m) * math.log1p(-q1)
    )


def overlap_law_1rsb(q0: float, q1: float, m: float) -> list[tuple[float, float]]:
    """Atoms ``(location, mass)`` of the 1RSB overlap distribution."""
    return [(q0, m), (q1, 1.0 - m)]


def _f1(q: float, m: float, k: int) -> float:
    return q ** (k - 2) * (1.0 - q) * (1.0 - (1.0 - m) * q)


def _f1_argmax(m: float, k: int) -> float:
    # Stationary point of log f1 solves (k-2)/q - 1/(1-q) - (1-m)/(1-(1-m)q) = 0.
    if k == 2:
        return 0.0
    a = 1.0 - m
    g = lambda q: (k - 2) / q - 1.0 / (1.0 - q) - a / (1.0 - a * q)
    return find_root(g, (1e-15, 1.0 - 1e-15))


def t_dynamic(m: float, k: int) -> float:
    """Largest temperature at which a nontrivial ``q1`` exists for this ``m``."""
    if k < 3:
        raise DomainError("1RSB analysis requires k >= 3")
    qm = _f1_argmax(m, k)
    return math.sqrt(k * _f1(qm, m, k) / 2.0)


def solve_q1_star(beta: float, m: float, k: int) -> float:
    """Largest root of ``q^{k-2} (1-q) (1-(1-m) q) = 2 T^2 / k``.

    Raises:
        NoSolutionError: If the temperature exceeds ``t_dynamic(m, k)``.
    """
    if beta <= 0:
        raise NoSolutionError("no nontrivial q1 at infinite temperature")
    target = 2.0 / (k * beta**2)
    qm = _f1_argmax(m, k)
    if _f1(qm, m, k) < target:
        raise NoSolutionError(f"T={1 / beta} exceeds T_d(m={m})")
    return find_root(lambda q: _f1(q, m, k) - target, (qm, 1.0))


def m_lower(T: float, k: int) -> float:
    """Smallest ``m`` for which a nontrivial ``q1`` exists at temperature ``T``."""
    if T <= t_dynamic(0.0, k):
        return 0.0
    if T > t_dynamic(1.0, k):
        raise NoSolutionError(f"T={T} is above T_d(1)")
    return find_root(lambda m: t_dynamic(m, k) - T, (0.0, 1.0))


def _g_of_m(m: float, beta: float, k: int) -> float:
    return psi_1rsb(solve_q1_star(beta, m, k), m, beta, k) - beta**2 / 4.0


def _dpsi_dm_at_one(T: float, k: int) -> float:
    # Envelope derivative of m -> Psi(q1*(m), m) at m = 1.
    beta = 1.0 / T
    q = solve_q1_star(beta, 1.0, k)
    return beta**2 * q**k / 4.0 + q / 2.0 + 0.5 * math.log1p(-q)


def t_static(k: int) -> float:
    """Static transition temperature.

    Below it the slope of ``m -> Psi_1RSB`` at ``m = 1`` turns positive, so the
    function dips below its value ``beta**2 / 4`` at ``m = 1``.
    """
    td = t_dynamic(1.0, k)
    lo = 0.05 * td
    while _dpsi_dm_at_one(lo, k) <= 0:
        lo /= 2.0
    return find_root(lambda T: _dpsi_dm_at_one(T, k), (lo, td * (1.0 - 1e-12)))


def m_star(T: float, k: int) -> tuple[float, float, float]:
    """Parisi parameter selected at temperature ``T``.

    Returns:
        ``(m, q1, psi)``. Above the static temperature this is ``m = 1`` with
        the replica-symmetric value ``beta**2 / 4`` and ``q1 = 0``.
    """
    if T <= 0:
        raise InvalidArgumentError("temperature must be positive")
    beta = 1.0 / T
    if T >= t_dynamic(1.0, k) or T >= t_static(k):
        return 1.0, 0.0, beta**2 / 4.0
    m_lo = m_lower(T, k) + 1e-6
    grid = np.linspace(m_lo, 1.0, 64)
    vals = np.array([_g_of_m(m, beta, k) for m in grid])
    i = int(np.argmin(vals))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    m, gval = minimize_scalar(lambda m: _g_of_m(m, beta, k), (lo, hi), tol=1e-12)
    if vals[i] < gval:
        m, gval = grid[i], vals[i]
    q1 = solve_q1_star(beta, m, k)
    return m, q1, psi_1rsb(q1, m, beta, k)


# ---------------------------------------------------------------------------
# Zero temperature and complexity
# ---------------------------------------------------------------------------


def z_star(mu: float, k: int) -> float:
    """Rescaled gap ``(1 - q1) / T`` in the zero-temperature limit."""
    return math.sqrt(2.0 / k + mu * mu / 4.0) - mu / 2.0


def e_1rsb(mu: float, k: int) -> float:
    """Zero-temperature 1RSB energy as a function of ``mu = m / T``."""
    z = z_star(mu, k)
    return 0.25 * (mu + k * z) + math.log1p(mu / z) / (2.0 * mu)


def gs_energy_1rsb(k: int) -> tuple[float, float]:
    """Minimize ``e_1rsb`` over ``mu``; returns ``(mu_star, e_star)``."""
    if k < 3:
        raise DomainError("ground-state analysis requires k >= 3")
    f = lambda mu: e_1rsb(mu, k)
    grid = np.linspace(0.05, 20.0, 400)
    i = int(np.argmin([f(x) for x in grid]))
    return minimize_scalar(f, (grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]), tol=1e-12)


def _m_psi(m: float, beta: float, k: int) -> float:
    return m * psi_1rsb(solve_q1_star(beta, m, k), m, beta, k)


def monasson_point(m: float, T: float, k: int, step: float = 1e-5) -> tuple[float, float]:
    """``(f, Sigma)`` at a single ``m`` by centered differencing of ``m Psi(m)``."""
    beta = 1.0 / T
    hstep = min(step, 0.5 * m)
    up = min(m + hstep, 1.0)
    dn = up - 2.0 * hstep
    f = (_m_psi(up, beta, k) - _m_psi(dn, beta, k)) / (up - dn)
    return f, _m_psi(m, beta, k) - m * f


def monasson_curve(T: float, k: int, m_grid=None) -> ComplexityCurve:
    """Complexity curve at temperature ``T`` parameterized by ``m``.

    Args:
        T: Temperature below ``T_d(1)``.
        k: Tensor order.
        m_grid: Values of ``m`` in ``(m(T), 1]``; a default grid of 200 points
            is used when omitted.

    Raises:
        NoSolutionError: If ``T >= T_d(1)`` (only the paramagnet exists).
    """
    if T >= t_dynamic(1.0, k):
        raise NoSolutionError(f"T={T} >= T_d(1): no complexity curve")
    m_lo = m_lower(T, k)
    if m_grid is None:
        m_grid = np.linspace(m_lo, 1.0, 201)[1:]
    m_grid = np.asarray(m_grid, dtype=float)
    if np.any(m_grid <= m_lo) or np.any(m_grid > 1.0):
        raise InvalidArgumentError("m_grid must lie in (m(T), 1]")
    pts = [monasson_point(m, T, k) for m in m_grid]
    order = np.argsort([p[0] for p in pts])
    return ComplexityCurve(
        samples=[pts[i] for i in order],
        temperature=T,
        m=[float(m_grid[i]) for i in order],
        m_min=m_lo,
    )


def extract_fs_fd_fstar(curve: ComplexityCurve, T: float) -> tuple[float, float, float]:
    """Characteristic free energies of a complexity curve.

    Returns:
        ``(f_s, f_d, f_star)``: the zero of ``Sigma`` (NaN if the curve has no
        sign change), the value at the smallest ``m`` on the curve, and the
        maximizer of ``f + Sigma`` over ``Sigma >= 0``.
    """
    f, s, m = curve.f, curve.sigma, np.asarray(curve.m)
    f_d = float(f[np.argmin(m)])
    f_s = math.nan
    by_m = np.argsort(m)
    fm, sm = f[by_m], s[by_m]
    for i in range(len(sm) - 1):
        if sm[i] >= 0 > sm[i + 1] or sm[i] > 0 >= sm[i + 1]:
            t = sm[i] / (sm[i] - sm[i + 1])
            f_s = float(fm[i] + t * (fm[i + 1] - fm[i]))
            break
    ok = s >= 0
    f_star = float(f[ok][np.argmax((f + s)[ok])]) if np.any(ok) else math.nan
    return f_s, f_d, f_star


def zero_t_complexity(eps: float, k: int) -> float:
    """Legendre dual of ``mu -> mu e_1rsb(mu)`` evaluated at energy ``eps``.

    Uses the branch ``mu > mu_d`` on which ``eps = d(mu e)/d mu`` is increasing.
    """
    phi = lambda mu: mu * e_1rsb(mu, k)
    mu = zero_t_mu_for_energy(eps, k)
    h = 1e-6
    return phi(mu) - mu * (phi(mu + h) - phi(mu - h)) / (2 * h)


def zero_t_mu_for_energy(eps: float, k: int) -> float:
    """Value of ``mu`` on the increasing branch where ``d(mu e)/d mu = eps``."""
    phi = lambda mu: mu * e_1rsb(mu, k)
    dphi = lambda mu, h=1e-6: (phi(mu + h) - phi(mu - h)) / (2 * h)
    lo, _ = minimize_scalar(dphi, (0.01, 5.0), tol=1e-10)
    hi = 2.0 * lo
    while dphi(hi) < eps:
        hi *= 2
    return find_root(lambda x: dphi(x) - eps, (lo, hi))


def monasson_zero_t(mu: float, k: int, temps=(0.02, 0.01)) -> tuple[float, float]:
    """Zero-temperature ``(eps, Sigma)`` at fixed ``mu = m / T`` by Richardson extrapolation.

    At fixed ``mu`` both ``T f`` and ``Sigma`` are smooth in ``T`` apart from the
    exact spherical-entropy term ``(T/2) log T`` in ``T f``, which is removed
    before extrapolating linearly from the two temperatures.
    """
    t1, t2 = temps
    vals = []
    for T in (t1, t2):
        f, sig = monasson_point(mu * T, T, k)
        vals.append((T * f - 0.5 * T * math.log(T), sig))
    (e1, s1), (e2, s2) = vals
    rich = lambda a, b: (t1 * b - t2 * a) / (t1 - t2)
    return rich(e1, e2), rich(s1, s2)

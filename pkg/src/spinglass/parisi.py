"""Replica-symmetry-breaking functionals for the SK model at zero signal.

Two independent evaluations of the same quantity live here:

* ``krsb_value`` runs the nested Gaussian recursion on a tensor grid of
  Gauss-Hermite nodes, with no interpolation.
* ``parisi_functional`` solves the Parisi PDE backwards on a spatial grid
  using the Cole-Hopf form on each interval where the measure is constant.

Ladder convention: ``q = (q_0 <= ... <= q_k)`` and ``m = (m_0 <= ... <= m_k = 1)``
where ``m_l`` is the value of the overlap distribution function on
``[q_l, q_{l+1})``. The atom at ``q_l`` has weight ``m_l - m_{l-1}`` with
``m_{-1} = 0``, so ``k = 0`` is replica symmetric and ``m_0 = 0`` gives the
first atom zero weight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize
from scipy.interpolate import CubicSpline
from scipy.special import logsumexp

from .errors import CapabilityError, GridError, InvalidArgumentError
from .numerics import RngLike, as_generator, gauss_hermite, log2cosh

P_STAR = 0.763166726567

# Cole-Hopf convolutions are truncated at this many standard deviations past
# the tilt m * beta * sigma of the integrand.
_TAIL_SIGMAS = 7.0
_M_ZERO = 1e-12


@dataclass(frozen=True)
class RsbLadder:
    """Order parameters ``(q, m)`` of a k-step replica-symmetry-breaking ansatz."""

    q: tuple
    m: tuple

    def __post_init__(self):
        q = tuple(float(v) for v in self.q)
        m = tuple(float(v) for v in self.m)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "m", m)
        if len(q) == 0 or len(q) != len(m):
            raise InvalidArgumentError("ladder needs |q| = |m| >= 1")
        if any(not 0.0 <= v <= 1.0 for v in q) or any(b < a for a, b in zip(q, q[1:])):
            raise InvalidArgumentError(f"q must be non-decreasing in [0, 1], got {q}")
        if any(not 0.0 <= v <= 1.0 for v in m) or any(b < a for a, b in zip(m, m[1:])):
            raise InvalidArgumentError(f"m must be non-decreasing in [0, 1], got {m}")
        if m[-1] != 1.0:
            raise InvalidArgumentError("the last m must equal 1")

    @property
    def k(self) -> int:
        return len(self.q) - 1

    def to_measure(self) -> "ParisiMeasure":
        """Equivalent Parisi measure: zero-weight atoms dropped, coincident atoms merged."""
        atoms: list = []
        prev = 0.0
        for q, m in zip(self.q, self.m):
            w = m - prev
            prev = m
            if w <= 0.0:
                continue
            if atoms and q == atoms[-1][0]:
                atoms[-1] = (q, atoms[-1][1] + w)
            else:
                atoms.append((q, w))
        return ParisiMeasure(tuple(atoms))


@dataclass(frozen=True)
class ParisiMeasure:
    """Finitely supported probability measure on ``[0, 1]``."""

    atoms: tuple

    def __post_init__(self):
        atoms = tuple((float(q), float(w)) for q, w in self.atoms)
        object.__setattr__(self, "atoms", atoms)
        if not atoms:
            raise InvalidArgumentError("measure needs at least one atom")
        locs = [a[0] for a in atoms]
        if any(not 0.0 <= q <= 1.0 for q in locs) or any(b <= a for a, b in zip(locs, locs[1:])):
            raise InvalidArgumentError(f"atom locations must be strictly increasing in [0, 1], got {locs}")
        if any(w <= 0.0 for _, w in atoms):
            raise InvalidArgumentError("atom weights must be positive")
        if abs(sum(w for _, w in atoms) - 1.0) > 1e-12:
            raise InvalidArgumentError("atom weights must sum to 1")

    @property
    def locations(self) -> np.ndarray:
        return np.array([a[0] for a in self.atoms])

    @property
    def weights(self) -> np.ndarray:
        return np.array([a[1] for a in self.atoms])

    def to_ladder(self) -> RsbLadder:
        cdf = np.cumsum(self.weights)
        cdf[-1] = 1.0
        return RsbLadder(tuple(self.locations), tuple(cdf))

    def second_moment(self) -> float:
        return float(self.weights @ self.locations**2)


@dataclass(frozen=True)
class PdeGrid:
    """Uniform spatial grid on ``[-x_max, x_max]``."""

    x_max: float
    nx: int = 2049

    def __post_init__(self):
        if int(self.nx) != self.nx or self.nx < 129:
            raise GridError(f"nx must be an integer >= 129, got {self.nx}")
        if not self.x_max > 0:
            raise GridError("x_max must be positive")

    @classmethod
    def default(cls, beta: float, nx: int = 2049) -> "PdeGrid":
        return cls(x_max=10.0 + 4.0 * beta, nx=nx)

    @classmethod
    def for_measure(cls, measure: "ParisiMeasure", beta: float, nx: int = 2049) -> "PdeGrid":
        """Default grid, widened at fixed spacing when the measure needs more room."""
        base = cls.default(beta, nx)
        h = base.spacing
        qs, cdf = measure.locations, np.cumsum(measure.weights)
        need = (_TAIL_SIGMAS + 1.0) * math.sqrt(qs[0]) + 2.0 * h
        for lvl in range(len(qs) - 1):
            sigma = math.sqrt(qs[lvl + 1] - qs[lvl])
            need += (_TAIL_SIGMAS + cdf[lvl] * beta * sigma) * sigma + 12.0 * sigma + 2.0 * h
        if need <= base.x_max:
            return base
        cells = math.ceil(need / h)
        return cls(x_max=cells * h, nx=2 * cells + 1)

    def validate(self, beta: float) -> None:
        if self.x_max < 10.0 + 4.0 * beta - 1e-12:
            raise GridError(f"x_max={self.x_max} is below 10 + 4 beta = {10 + 4 * beta}")

    @property
    def spacing(self) -> float:
        return 2.0 * self.x_max / (self.nx - 1)


def _top(x, beta: float, q_top: float):
    # Cole-Hopf with m = 1 on [q_top, 1] is exact: E 2cosh(b(x+s g)) = 2cosh(bx) e^{b^2 s^2/2}.
    return 0.5 * beta**2 * (1.0 - q_top) + log2cosh(beta * x)


# ---------------------------------------------------------------------------
# nested quadrature


def _level_orders(beta: float, sigmas, budget: float = 4e7) -> list:
    # The integrand is analytic in a strip of half-width ~ pi / (2 beta sigma)
    # in g. The node count grows like (beta sigma)^2; the constant was tuned so
    # a single level matches adaptive quadrature to ~1e-11 at beta = 3.
    n = np.array([min(max(math.ceil(60.0 * (beta * s) ** 2), 24), 1601) for s in sigmas], dtype=float)
    total = float(np.prod(n))
    if total > budget:
        n = np.maximum(np.floor(n * (budget / total) ** (1.0 / len(n))), 12)
    return [int(v) for v in n]


def _cole_hopf_nodes(f, x, sigma, m, rule, budget=4_000_000):
    """``(1/m) log E exp(m f(x + sigma G))`` (or ``E f`` when ``m = 0``) on the rule's nodes."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    chunk = max(1, budget // len(rule.nodes))
    logw = np.log(rule.weights)
    for s in range(0, len(x), chunk):
        xs = x[s : s + chunk]
        vals = f((xs[:, None] + sigma * rule.nodes[None, :]).ravel()).reshape(len(xs), -1)
        if m <= _M_ZERO:
            out[s : s + chunk] = vals @ rule.weights
        else:
            out[s : s + chunk] = logsumexp(m * vals + logw, axis=1) / m
    return out


def krsb_value(ladder: RsbLadder, beta: float, orders=None) -> float:
    """k-step RSB free-energy functional by nested Gauss-Hermite recursion.

    Args:
        ladder: Order parameters with ``k <= 3``.
        beta: Inverse temperature.
        orders: Optional per-level node counts (outermost first, ``k + 1``
            entries). By default each level picks a count from ``beta`` and
            its increment so the integrand is resolved.

    Raises:
        CapabilityError: If ``k > 3``; use ``parisi_functional``.
    """
    if ladder.k > 3:
        raise CapabilityError("nested quadrature supports k <= 3; use parisi_functional")
    q, m = np.array(ladder.q), np.array(ladder.m)
    sig = np.sqrt(np.diff(np.concatenate([[0.0], q])))
    if orders is None:
        orders = _level_orders(beta, sig)
    if len(orders) != len(q):
        raise InvalidArgumentError("need one quadrature order per level")

    f = lambda x: _top(x, beta, q[-1])
    # Levels k-1, ..., 0 use exponent m_l and increment q_{l+1} - q_l.
    for lvl in range(ladder.k - 1, -1, -1):
        f = _bind_level(f, sig[lvl + 1], m[lvl], gauss_hermite(orders[lvl + 1]))
    # Below q_0 the distribution function vanishes: plain expectation.
    phi00 = float(_cole_hopf_nodes(f, np.zeros(1), sig[0], 0.0, gauss_hermite(orders[0]))[0])
    weights = np.diff(np.concatenate([[0.0], m]))
    return -0.25 * beta**2 + 0.25 * beta**2 * float(weights @ q**2) + phi00


def _bind_level(inner, sigma, m, rule):
    return lambda x: _cole_hopf_nodes(inner, x, sigma, m, rule)


# ---------------------------------------------------------------------------
# Parisi PDE


def _grid_step(vals, h, sigma, m, beta):
    """Cole-Hopf step on grid values; returns values on the shrunken interior."""
    half = math.ceil((_TAIL_SIGMAS + m * beta * sigma) * sigma / h)
    if 2 * half + 1 > len(vals):
        raise GridError("spatial grid too small for the Gaussian smoothing")
    offs = np.arange(-half, half + 1) * h
    logk = -0.5 * (offs / sigma) ** 2 + math.log(h / (sigma * math.sqrt(2.0 * math.pi)))
    win = np.lib.stride_tricks.sliding_window_view(vals, 2 * half + 1)
    centre = vals[half : len(vals) - half]
    if m <= _M_ZERO:
        return win @ np.exp(logk), half
    return centre + logsumexp(m * (win - centre[:, None]) + logk, axis=1) / m, half


def _spline_step(vals, x, sigma, m, beta, rule):
    """Cole-Hopf step for increments below the grid resolution."""
    reach = sigma * float(np.max(rule.nodes))
    h = x[1] - x[0]
    half = math.ceil(reach / h) + 1
    if 2 * half + 1 > len(vals):
        raise GridError("spatial grid too small for the Gaussian smoothing")
    spline = CubicSpline(x, vals)
    return _cole_hopf_nodes(spline, x[half : len(x) - half], sigma, m, rule), half


def parisi_phi(measure: ParisiMeasure, beta: float, grid: PdeGrid | None = None) -> float:
    """``Phi(0, 0)`` for the Parisi PDE with a finitely supported measure.

    The solution is carried backwards from the top atom. On ``[q_top, 1]`` the
    measure's distribution function equals 1 and the closed form applies. On
    each earlier interval the Cole-Hopf convolution is evaluated on the grid
    by the trapezoid rule when the increment spans at least four grid cells,
    and by Gauss-Hermite nodes on a cubic spline otherwise. Each step only
    keeps points whose stencil lies inside the current domain, so no boundary
    extrapolation is needed.

    Raises:
        GridError: If the grid violates its invariants or cannot hold the
            total smoothing.
    """
    grid = grid or PdeGrid.for_measure(measure, beta)
    grid.validate(beta)
    qs, cdf = measure.locations, np.cumsum(measure.weights)
    x = np.linspace(-grid.x_max, grid.x_max, int(grid.nx))
    h = x[1] - x[0]
    vals = _top(x, beta, qs[-1])
    rule = gauss_hermite(41)
    for lvl in range(len(qs) - 2, -1, -1):
        sigma = math.sqrt(qs[lvl + 1] - qs[lvl])
        if sigma >= 4.0 * h:
            vals, cut = _grid_step(vals, h, sigma, cdf[lvl], beta)
        else:
            vals, cut = _spline_step(vals, x, sigma, cdf[lvl], beta, rule)
        x = x[cut : len(x) - cut]
    sigma0 = math.sqrt(qs[0])
    if sigma0 == 0.0:
        return float(CubicSpline(x, vals)(0.0)) if not np.any(x == 0.0) else float(vals[np.argmin(np.abs(x))])
    # Plain Gaussian expectation at x = 0, trapezoid over the remaining nodes.
    if sigma0 >= 4.0 * h:
        reach = (_TAIL_SIGMAS + 1.0) * sigma0
        if x[0] > -reach or x[-1] < reach:
            raise GridError("spatial grid too small for the Gaussian smoothing")
        dens = np.exp(-0.5 * (x / sigma0) ** 2) / (sigma0 * math.sqrt(2.0 * math.pi))
        return float(h * (dens @ vals))
    if x[0] > -sigma0 * 12 or x[-1] < sigma0 * 12:
        raise GridError("spatial grid too small for the Gaussian smoothing")
    return rule.expect(lambda g: CubicSpline(x, vals)(sigma0 * g))


def parisi_functional(measure: ParisiMeasure, beta: float, grid: PdeGrid | None = None) -> float:
    """``P(rho) = -beta^2/4 + beta^2/4 int q^2 rho(dq) + Phi(0, 0)``."""
    return -0.25 * beta**2 + 0.25 * beta**2 * measure.second_moment() + parisi_phi(measure, beta, grid)


# ---------------------------------------------------------------------------
# minimization


@dataclass(frozen=True)
class ParisiFit:
    measure: ParisiMeasure
    value: float
    beta: float
    n_atoms: int
    starts: int
    history: tuple = field(default=())


def _decode(z: np.ndarray, k: int) -> RsbLadder:
    q = np.sort(np.clip(z[:k], 0.0, 1.0))
    m = np.concatenate([np.sort(np.clip(z[k:], 0.0, 1.0)), [1.0]])
    return RsbLadder(tuple(q), tuple(m))


def _encode(measure: ParisiMeasure, k: int) -> np.ndarray:
    lad = measure.to_ladder()
    q, m = list(lad.q), list(lad.m)
    while len(q) < k:
        # Pad with duplicate top atoms of zero extra weight.
        q.append(q[-1])
        m.insert(len(m) - 1, m[-2] if len(m) > 1 else 1.0)
    return np.array(q[:k] + m[: k - 1])


def _default_starts(k: int, beta: float, n: int, gen: np.random.Generator) -> list:
    starts = []
    qrs = max(0.0, 1.0 - 1.0 / beta) if beta > 1 else 0.0
    base_q = np.linspace(max(qrs - 0.3, 0.0), min(qrs + 0.1, 0.999), k)
    base_m = np.linspace(0.0, 1.0, k + 1)[1:-1] * min(1.0, 1.5 / beta)
    starts.append(np.concatenate([base_q, base_m]))
    while len(starts) < n:
        q = np.sort(gen.uniform(0.0, 1.0, k))
        m = np.sort(gen.uniform(0.0, min(1.0, 2.0 / beta), k - 1))
        starts.append(np.concatenate([q, m]))
    return starts


def minimize_parisi(
    n_atoms: int,
    beta: float,
    grid: PdeGrid | None = None,
    starts: int = 8,
    init: list | None = None,
    rng: RngLike | None = None,
    tol: float = 1e-11,
) -> ParisiFit:
    """Minimize the Parisi functional over measures with at most ``n_atoms`` atoms.

    Each start runs bounded quasi-Newton descent on the box of
    ``(q_1..q_k, m_1..m_{k-1})``; sorting maps every box point to a valid
    ladder. Starts come from ``init`` (e.g. the optimum with fewer atoms,
    which makes the value non-increasing in ``n_atoms``) followed by a
    deterministic spread and random draws.

    Args:
        n_atoms: Number of atoms ``k`` in ``{1, 2, 3}``.
        beta: Inverse temperature.
        grid: PDE grid; defaults to ``PdeGrid.default(beta)``.
        starts: Total number of starting points.
        init: Measures used as the first starts.
        rng: Source for random starts (default seed 0).
    """
    if n_atoms not in (1, 2, 3):
        raise InvalidArgumentError("n_atoms must be 1, 2 or 3")
    if beta <= 0:
        raise InvalidArgumentError("beta must be positive")
    grid = grid or PdeGrid.default(beta)
    gen = as_generator(rng) if rng is not None else np.random.default_rng(0)
    k = n_atoms
    points = [_encode(mu, k) for mu in (init or [])]
    points += _default_starts(k, beta, max(starts - len(points), 0), gen)

    cache: dict = {}

    def objective(z):
        key = tuple(np.round(z, 15))
        if key not in cache:
            cache[key] = parisi_functional(_decode(z, k).to_measure(), beta, grid)
        return cache[key]

    best_z, best_v, history = None, math.inf, []
    bounds = [(0.0, 1.0)] * (2 * k - 1)
    for z0 in points:
        res = optimize.minimize(
            objective, np.clip(z0, 0.0, 1.0), method="L-BFGS-B", bounds=bounds,
            options={"ftol": tol, "gtol": 1e-9, "eps": 1e-7, "maxiter": 500},
        )
        v = objective(res.x)
        history.append(v)
        if v < best_v:
            best_z, best_v = res.x, v
    return ParisiFit(_decode(best_z, k).to_measure(), float(best_v), beta, k, len(points), tuple(history))


def extrapolate_pstar(betas, values) -> tuple[float, float]:
    """Fit ``P*(beta)/beta = a + c / beta`` by least squares; returns ``(a, c)``."""
    b = np.asarray(betas, dtype=float)
    y = np.asarray(values, dtype=float) / b
    c, a = np.polyfit(1.0 / b, y, 1)
    return float(a), float(c)

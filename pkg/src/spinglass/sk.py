"""Sherrington-Kirkpatrick / Z2 synchronization replica-symmetric computations."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError, InvalidArgumentError
from .numerics import find_root, gauss_hermite, log2cosh, minimize_scalar

# log 2cosh(beta x) is sharp on the scale 1/beta, so expectations here need more
# nodes than the package default to stay accurate to 1e-10 for beta and lambda up to 3.
SK_ORDER = 801


@dataclass(frozen=True)
class SkParams:
    """Parameters of the Gibbs measure ``exp(beta/2 <Y, s s^T> + h <s, x0>)``."""

    beta: float
    lam: float = 0.0
    h: float = 0.0

    def __post_init__(self):
        for name in ("beta", "lam", "h"):
            if getattr(self, name) < 0:
                raise InvalidArgumentError(f"{name} must be non-negative")


@dataclass(frozen=True)
class SkRsPoint:
    b: float
    q: float


def _fields(b: float, q: float, params: SkParams, order: int) -> tuple[np.ndarray, np.ndarray]:
    rule = gauss_hermite(order)
    u = params.beta * (params.lam * b + math.sqrt(max(q, 0.0)) * rule.nodes) + params.h
    return u, rule.weights


def sk_psi_rs(b: float, q: float, params: SkParams, order: int = SK_ORDER) -> float:
    """Replica-symmetric functional ``Psi_RS(b, q)`` evaluated by quadrature."""
    if not 0.0 <= q < 1.0:
        raise DomainError(f"q must lie in [0, 1), got {q}")
    beta, lam = params.beta, params.lam
    u, w = _fields(b, q, params, order)
    return beta**2 / 4.0 * (1.0 - q) ** 2 - 0.5 * beta * lam * b * b + float(w @ log2cosh(u))


def sk_rs_map(b: float, q: float, params: SkParams, order: int = SK_ORDER) -> tuple[float, float]:
    """Right-hand side ``(E tanh, E tanh^2)`` of the fixed-point equations."""
    u, w = _fields(b, q, params, order)
    t = np.tanh(u)
    return float(w @ t), float(w @ (t * t))


def sk_solve_rs(
    params: SkParams,
    damping: float = 0.5,
    tol: float = 1e-12,
    max_iter: int = 100_000,
    order: int = SK_ORDER,
    start: tuple[float, float] = (1.0, 1.0),
) -> SkRsPoint:
    """Solve ``b = E tanh(...)``, ``q = E tanh^2(...)`` by damped iteration.

    Starting from the fully magnetized point the iteration decreases to the
    largest fixed point, which is ``(0, 0)`` whenever that is the only one.
    A Newton polish finishes once the iteration is close.

    Raises:
        ConvergenceError: If the residual stays above ``tol``.
    """
    b, q = start
    if params.lam == 0.0 and params.h == 0.0:
        b = 0.0
    a = 1.0 - damping
    for it in range(max_iter):
        nb, nq = sk_rs_map(b, q, params, order)
        res = max(abs(nb - b), abs(nq - q))
        if res <= tol:
            return SkRsPoint(nb, nq)
        if res < 1e-7 or (it > 200 and it % 50 == 0):
            polished = _newton_polish(b, q, params, order, tol)
            if polished is not None:
                return polished
        b, q = b + a * (nb - b), q + a * (nq - q)
    raise ConvergenceError(f"RS iteration did not converge for {params}; residual {res:.3g}")


def _rs_jacobian(b, q, params, order):
    # d/dq E F(u) = beta^2/2 E F''(u) by Gaussian integration by parts.
    u, w = _fields(b, q, params, order)
    t = np.tanh(u)
    s2 = 1.0 - t * t
    bl, half = params.beta * params.lam, 0.5 * params.beta**2
    return np.array(
        [
            [bl * (w @ s2), half * (w @ (-2.0 * t * s2))],
            [bl * (w @ (2.0 * t * s2)), half * (w @ (2.0 * s2 * s2 - 4.0 * t * t * s2))],
        ]
    )


def _newton_polish(b, q, params, order, tol):
    v = np.array([b, q], dtype=float)
    # Degenerate roots (at a phase boundary) converge only linearly.
    for _ in range(300):
        nb, nq = sk_rs_map(v[0], v[1], params, order)
        r = np.array([nb - v[0], nq - v[1]])
        jac = _rs_jacobian(v[0], v[1], params, order) - np.eye(2)
        try:
            step = np.linalg.solve(jac, -r)
        except np.linalg.LinAlgError:
            return None
        # A small residual is not enough near q = 0, where the map is nearly flat.
        if np.max(np.abs(r)) <= tol and np.max(np.abs(step)) <= tol:
            return SkRsPoint(float(nb), float(nq))
        v = v + step
        v[1] = max(v[1], 0.0)
        if not np.all(np.isfinite(v)) or v[1] >= 1.0:
            return None
    return None


def sk_rs_entropy(beta: float, order: int = SK_ORDER) -> float:
    """Entropy ``Psi - beta dPsi/dbeta`` along the replica-symmetric solution at zero signal.

    The total beta-derivative equals the partial one at fixed ``q`` because
    ``q`` is stationary. Gaussian integration by parts gives
    ``dPsi/dbeta = beta/2 (1-q)^2 + beta q (1-q)``.
    """
    if beta <= 0:
        raise DomainError("entropy requires beta > 0")
    params = SkParams(beta=beta)
    q = sk_solve_rs(params, order=order).q
    psi = sk_psi_rs(0.0, q, params, order)
    dpsi = beta / 2.0 * (1.0 - q) ** 2 + beta * q * (1.0 - q)
    return psi - beta * dpsi


def sk_rs_min_over_q(beta: float, order: int = SK_ORDER) -> tuple[float, float]:
    """``(argmin, min)`` of ``q -> Psi_RS(0, q)`` at zero signal and field."""
    params = SkParams(beta=beta)
    f = lambda q: sk_psi_rs(0.0, q, params, order)
    grid = np.linspace(0.0, 0.999, 200)
    vals = [f(x) for x in grid]
    i = int(np.argmin(vals))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    q, v = minimize_scalar(f, (lo, hi), tol=1e-12)
    if vals[i] < v:
        q, v = grid[i], vals[i]
    return float(q), float(v)


def bayes_overlap(lam: float, order: int = SK_ORDER) -> float:
    """Largest solution of ``b = E tanh(lam^2 b + lam sqrt(b) G)``."""
    rule = gauss_hermite(order)
    f = lambda b: float(rule.weights @ np.tanh(lam * lam * b + lam * math.sqrt(b) * rule.nodes)) - b
    if lam <= 1.0:
        return 0.0
    # f > 0 just above 0 when lam > 1 and f(1) < 0.
    return find_root(f, (1e-12, 1.0))

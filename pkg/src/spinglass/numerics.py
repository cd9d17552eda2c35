"""Shared numerical kernel.

Gaussian quadrature, seeded random streams, GOE sampling, semicircle
integrals, scalar root finding and minimization, symmetric eigenvalues.
Every function here is pure given its explicit inputs.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np
from scipy import optimize
from scipy.special import roots_hermitenorm

from .errors import BracketError, DomainError, InvalidArgumentError

DEFAULT_ORDER = 61


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Hermite rule for expectations over a standard normal.

    Attributes:
        nodes: Abscissae, symmetric about zero.
        weights: Positive weights summing to one.
    """

    nodes: np.ndarray
    weights: np.ndarray

    def expect(self, f: Callable[[np.ndarray], np.ndarray]) -> float:
        """Approximate ``E[f(G)]`` for ``G ~ N(0, 1)``."""
        return float(np.dot(self.weights, f(self.nodes)))

    @property
    def order(self) -> int:
        return len(self.nodes)


@functools.lru_cache(maxsize=32)
def _cached_rule(order: int) -> QuadratureRule:
    x, w = roots_hermitenorm(order)
    w = w / w.sum()
    # Symmetrize to remove round-off asymmetry from the eigen-solver.
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    x.setflags(write=False)
    w.setflags(write=False)
    return QuadratureRule(nodes=x, weights=w)


def gauss_hermite(order: int = DEFAULT_ORDER) -> QuadratureRule:
    """Return the ``order``-point Gauss-Hermite rule for the N(0,1) weight.

    The rule integrates polynomials of degree up to ``2 * order - 1`` exactly.

    Args:
        order: Number of nodes, at least 2.

    Raises:
        InvalidArgumentError: If ``order < 2``.
    """
    if int(order) != order or order < 2:
        raise InvalidArgumentError(f"quadrature order must be an integer >= 2, got {order}")
    return _cached_rule(int(order))


@dataclass(frozen=True)
class RngStream:
    """Reproducible random substream identified by ``(seed, stream_id)``.

    Substreams are derived from a ``SeedSequence`` spawn key and drive a
    counter-based Philox generator, so replicate ``i`` gets the same draws no
    matter which worker or in which order it runs.
    """

    seed: int = 0
    stream_id: int = 0
    path: tuple = field(default=())

    def child(self, index: int) -> "RngStream":
        """Return the independent substream with the given index."""
        return RngStream(self.seed, self.stream_id, self.path + (int(index),))

    def generator(self) -> np.random.Generator:
        """Return a fresh generator positioned at the start of this stream."""
        ss = np.random.SeedSequence(
            entropy=int(self.seed) & 0xFFFFFFFFFFFFFFFF,
            spawn_key=(int(self.stream_id) & 0xFFFFFFFFFFFFFFFF,) + self.path,
        )
        return np.random.Generator(np.random.Philox(ss))


RngLike = Union[RngStream, np.random.Generator]


def as_generator(rng: RngLike) -> np.random.Generator:
    """Accept either an ``RngStream`` or a numpy ``Generator``."""
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise InvalidArgumentError(f"expected RngStream or numpy Generator, got {type(rng)!r}")


def goe_sample(n: int, rng: RngLike) -> np.ndarray:
    """Draw ``W ~ GOE(n)``: off-diagonal variance ``1/n``, diagonal ``2/n``.

    Args:
        n: Dimension, at least 1.
        rng: Random stream or generator.

    Returns:
        Symmetric ``(n, n)`` array.
    """
    if int(n) != n or n < 1:
        raise InvalidArgumentError(f"GOE dimension must be a positive integer, got {n}")
    n = int(n)
    g = as_generator(rng).standard_normal((n, n))
    return (g + g.T) / np.sqrt(2.0 * n)


def semicircle_omega(x):
    """Logarithmic potential of the semicircle law on ``[-2, 2]``.

    Computes ``Omega(x) = int log|l - x| s(dl)`` in closed form. Accepts
    scalars or arrays.
    """
    x = np.asarray(x, dtype=float)
    ax = np.abs(np.atleast_1d(x))
    out = ax**2 / 4.0 - 0.5
    outside = ax > 2.0
    if np.any(outside):
        a = ax[outside]
        r = np.sqrt(a * a - 4.0)
        out[outside] = out[outside] - a * r / 4.0 + np.log(a / 2.0 + r / 2.0)
    return out.reshape(x.shape) if x.ndim else float(out[0])


def semicircle_stieltjes(z: float) -> float:
    """Return ``int (z - l)^{-1} s(dl)`` for ``|z| > 2``.

    Raises:
        DomainError: If ``|z| <= 2`` (inside the support).
    """
    z = float(z)
    if abs(z) <= 2.0:
        raise DomainError(f"Stieltjes transform needs |z| > 2, got {z}")
    return (z - np.sign(z) * np.sqrt(z * z - 4.0)) / 2.0


def find_root(f: Callable[[float], float], bracket, tol: float = 1e-12) -> float:
    """Bracketed root of a scalar function.

    Args:
        f: Continuous scalar function.
        bracket: ``(lo, hi)`` with ``f(lo) * f(hi) <= 0``.
        tol: Target accuracy. The bracket is shrunk to machine precision so
            ``|f(root)|`` is limited only by the conditioning of ``f``.

    Raises:
        BracketError: If ``f`` has the same strict sign at both ends.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        raise BracketError(f"no sign change on [{lo}, {hi}]: f={flo:.3g}, {fhi:.3g}")
    return float(optimize.brentq(f, lo, hi, xtol=min(tol, 1e-14), rtol=4 * np.finfo(float).eps, maxiter=500))


def minimize_scalar(f: Callable[[float], float], bracket, tol: float = 1e-10):
    """Bounded scalar minimization (Brent's method with golden-section steps).

    Returns:
        ``(argmin, min)`` for a local minimum inside ``bracket``.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise BracketError(f"empty interval [{lo}, {hi}]")
    res = optimize.minimize_scalar(f, bounds=(lo, hi), method="bounded", options={"xatol": tol, "maxiter": 1000})
    x = float(res.x)
    return x, float(f(x))


@dataclass(frozen=True)
class SymmetricSpectrum:
    """Eigenvalues of a real symmetric matrix in ascending order."""

    eigenvalues: np.ndarray

    def __len__(self) -> int:
        return len(self.eigenvalues)


def sym_eigvals(matrix) -> SymmetricSpectrum:
    """Eigenvalues of a symmetric matrix.

    Raises:
        InvalidArgumentError: If the input is not square or its asymmetry
            exceeds ``1e-10`` in max-norm.
    """
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidArgumentError(f"expected a square matrix, got shape {a.shape}")
    if a.size and np.max(np.abs(a - a.T)) > 1e-10:
        raise InvalidArgumentError("matrix is not symmetric")
    return SymmetricSpectrum(eigenvalues=np.linalg.eigvalsh(a))


def semicircle_cdf(x):
    """Distribution function of the semicircle law on ``[-2, 2]``."""
    x = np.clip(np.asarray(x, dtype=float), -2.0, 2.0)
    return 0.5 + (x * np.sqrt(4.0 - x * x) / 4.0 + np.arcsin(x / 2.0)) / np.pi


def log2cosh(x):
    """Overflow-safe ``log(2 cosh x)``."""
    ax = np.abs(x)
    return ax + np.log1p(np.exp(-2.0 * ax))

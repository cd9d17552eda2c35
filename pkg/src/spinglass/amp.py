"""Approximate message passing for Z2 synchronization and its state evolution."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InvalidArgumentError
from .numerics import RngLike, as_generator, gauss_hermite, goe_sample, sym_eigvals

SE_ORDER = 201


@dataclass(frozen=True)
class SpikedInstance:
    """``Y = (lam/n) x0 x0^T + W`` with ``W ~ GOE(n)``."""

    n: int
    lam: float
    x0: np.ndarray
    Y: np.ndarray


@dataclass(frozen=True)
class AmpState:
    """AMP iterate ``x_t`` with the quantities needed for the next Onsager term.

    Attributes:
        t: Iteration index.
        x_t: Current iterate.
        x_prev: Previous iterate (``None`` at ``t = 0``).
        onsager: Coefficient ``d_{t-1}`` used to form ``x_t`` (0 at ``t <= 1``).
        f_prev: ``f_{t-1}(x_prev)``; the memory term of the next step.
    """

    t: int
    x_t: np.ndarray
    x_prev: np.ndarray | None = None
    onsager: float = 0.0
    f_prev: np.ndarray | None = None


@dataclass(frozen=True)
class NonlinearitySchedule:
    """Per-iteration denoiser ``f(t, y)`` with derivative ``df(t, y)``."""

    f: Callable[[int, np.ndarray], np.ndarray]
    df: Callable[[int, np.ndarray], np.ndarray]
    name: str = "custom"

    @classmethod
    def bayes(cls, lam: float) -> "NonlinearitySchedule":
        """Posterior-mean denoiser ``tanh(lam y)`` for a +-1 signal."""
        return cls(
            f=lambda t, y: np.tanh(lam * y),
            df=lambda t, y: lam / np.cosh(lam * y) ** 2,
            name=f"bayes({lam})",
        )

    @classmethod
    def tanh(cls) -> "NonlinearitySchedule":
        return cls(f=lambda t, y: np.tanh(y), df=lambda t, y: 1.0 / np.cosh(y) ** 2, name="tanh")


@dataclass(frozen=True)
class SeTrajectory:
    """State-evolution parameters: ``x_t`` behaves like ``a_t X0 + sqrt(q_t) G``."""

    a: np.ndarray
    q: np.ndarray

    @property
    def entries(self) -> list:
        return list(zip(self.a.tolist(), self.q.tolist()))


@dataclass(frozen=True)
class AmpRun:
    """Trajectory summaries of one AMP run, indexed by ``t = 0..T``."""

    overlap: np.ndarray
    sqnorm: np.ndarray
    f_overlap: np.ndarray
    f_sqnorm: np.ndarray
    final: AmpState


def sample_instance(n: int, lam: float, rng: RngLike) -> SpikedInstance:
    """Draw ``x0`` uniform on ``{-1, +1}^n`` and ``Y = (lam/n) x0 x0^T + W``."""
    if n < 2:
        raise InvalidArgumentError("n must be at least 2")
    gen = as_generator(rng)
    x0 = gen.choice(np.array([-1.0, 1.0]), size=n)
    W = goe_sample(n, gen)
    return SpikedInstance(n=n, lam=float(lam), x0=x0, Y=W + (lam / n) * np.outer(x0, x0))


def amp_step(state: AmpState, Y: np.ndarray, f_t, df_t, onsager: bool = True) -> AmpState:
    """``x_{t+1} = Y f_t(x_t) - d_t f_{t-1}(x_{t-1})`` with ``d_t = mean f_t'(x_t)``.

    Args:
        state: Current state; at ``t = 0`` the memory term is absent.
        Y: Symmetric data matrix.
        f_t: Denoiser for this step, applied elementwise.
        df_t: Its derivative.
        onsager: Set False to drop the memory term (ablation only).
    """
    x = state.x_t
    if Y.shape != (len(x), len(x)):
        raise InvalidArgumentError(f"dimension mismatch: Y {Y.shape}, x {x.shape}")
    fx = f_t(x)
    d = float(np.mean(df_t(x)))
    new = Y @ fx
    if onsager and state.f_prev is not None:
        new = new - d * state.f_prev
    return AmpState(t=state.t + 1, x_t=new, x_prev=x, onsager=d, f_prev=fx)


def run_amp(
    instance: SpikedInstance,
    schedule: NonlinearitySchedule,
    x_init: np.ndarray,
    T: int,
    onsager: bool = True,
) -> AmpRun:
    """Run ``T`` AMP steps and record per-iteration summaries.

    ``overlap[t]`` and ``sqnorm[t]`` are ``(1/n)<x0, x_t>`` and
    ``(1/n)||x_t||^2``; ``f_overlap[t]`` and ``f_sqnorm[t]`` are the same
    for ``f_t(x_t)``.
    """
    if T < 1:
        raise InvalidArgumentError("T must be at least 1")
    n, x0 = instance.n, instance.x0
    state = AmpState(t=0, x_t=np.asarray(x_init, dtype=float))
    ov, sq, fov, fsq = [], [], [], []
    for t in range(T + 1):
        fx = schedule.f(t, state.x_t)
        ov.append(float(x0 @ state.x_t) / n)
        sq.append(float(state.x_t @ state.x_t) / n)
        fov.append(float(x0 @ fx) / n)
        fsq.append(float(fx @ fx) / n)
        if t < T:
            state = amp_step(state, instance.Y, lambda y: schedule.f(t, y), lambda y: schedule.df(t, y), onsager)
    return AmpRun(np.array(ov), np.array(sq), np.array(fov), np.array(fsq), state)


def side_information(instance: SpikedInstance, eps: float, rng: RngLike) -> np.ndarray:
    """``eps x0 + g`` with ``g`` standard normal and independent of the noise."""
    if eps < 0:
        raise InvalidArgumentError("eps must be non-negative")
    return eps * instance.x0 + as_generator(rng).standard_normal(instance.n)


def run_bayes_amp(instance: SpikedInstance, eps_side_info: float, T: int, rng: RngLike) -> AmpRun:
    """Bayes AMP (``f_t = tanh(lam y)``) from side information ``eps x0 + g``."""
    x_init = side_information(instance, eps_side_info, rng)
    return run_amp(instance, NonlinearitySchedule.bayes(instance.lam), x_init, T)


def spectral_init(instance: SpikedInstance) -> np.ndarray:
    """Top eigenvector of ``Y`` scaled to norm ``sqrt(n)``.

    This start depends on the noise matrix, so state evolution as
    implemented here does not describe AMP runs that use it.
    """
    _, vecs = np.linalg.eigh(instance.Y)
    sym_eigvals(instance.Y)  # symmetry check
    v = vecs[:, -1]
    return np.sqrt(instance.n) * v


def state_evolution(lam: float, schedule: NonlinearitySchedule, a0: float, q0: float, T: int) -> SeTrajectory:
    """``a_{t+1} = lam E[X0 f_t(a_t X0 + sqrt(q_t) G)]``, ``q_{t+1} = E[f_t(...)^2]`` for +-1 ``X0``."""
    if q0 < 0:
        raise InvalidArgumentError("q0 must be non-negative")
    rule = gauss_hermite(SE_ORDER)
    a, q = [float(a0)], [float(q0)]
    for t in range(T):
        s = np.sqrt(q[-1]) * rule.nodes
        fp, fm = schedule.f(t, a[-1] + s), schedule.f(t, -a[-1] + s)
        a.append(lam * 0.5 * float(rule.weights @ (fp - fm)))
        q.append(0.5 * float(rule.weights @ (fp * fp + fm * fm)))
    return SeTrajectory(np.array(a), np.array(q))


def bayes_se(lam: float, b0: float, T: int) -> list:
    """Scalar recursion ``b_{t+1} = E tanh(lam^2 b_t + lam sqrt(b_t) G)``."""
    if not 0 <= b0 <= 1:
        raise InvalidArgumentError("b0 must lie in [0, 1]")
    rule = gauss_hermite(SE_ORDER)
    b = [float(b0)]
    for _ in range(T):
        b.append(float(rule.weights @ np.tanh(lam * lam * b[-1] + lam * np.sqrt(b[-1]) * rule.nodes)))
    return b


def se_expectation(F, a: float, q: float) -> float:
    """``E F(X0, a X0 + sqrt(q) G)`` for uniform +-1 ``X0``."""
    rule = gauss_hermite(SE_ORDER)
    s = np.sqrt(q) * rule.nodes
    return 0.5 * float(rule.weights @ (F(1.0, a + s) + F(-1.0, -a + s)))


@dataclass(frozen=True)
class SeComparison:
    """Per-``t`` gaps between replicate-averaged empirical summaries and state evolution.

    Each dict is keyed by test function ``F(x0, x)``: ``overlap`` is
    ``x0 x``, ``sqnorm`` is ``x^2``, ``tanh2`` is ``tanh(lam x)^2`` and
    ``tanh_overlap`` is ``x0 tanh(lam x)``. Arrays run over ``t = 0..T``.
    """

    se: SeTrajectory
    empirical: dict
    predicted: dict
    deviation: dict
    std_error: dict

    def max_deviation(self, key: str) -> float:
        return float(np.max(self.deviation[key]))


def empirical_vs_se(n: int, lam: float, eps: float, T: int, reps: int, rng, schedule=None) -> SeComparison:
    """Compare ``(1/n) sum F(x0_i, x_t,i)`` with its state-evolution limit.

    Replicate ``r`` uses ``rng.child(r)`` for the instance and side information.
    """
    if n < 1000:
        raise InvalidArgumentError("n must be at least 1000")
    schedule = schedule or NonlinearitySchedule.bayes(lam)
    se = state_evolution(lam, schedule, eps, 1.0, T)
    tests = {
        "overlap": lambda x0, x: x0 * x,
        "sqnorm": lambda x0, x: x * x,
        "tanh2": lambda x0, x: np.tanh(lam * x) ** 2,
        "tanh_overlap": lambda x0, x: x0 * np.tanh(lam * x),
    }
    emp = {k: np.zeros((reps, T + 1)) for k in tests}
    for r in range(reps):
        sub = rng.child(r) if hasattr(rng, "child") else rng
        gen = as_generator(sub)
        inst = sample_instance(n, lam, gen)
        state = AmpState(t=0, x_t=side_information(inst, eps, gen))
        for t in range(T + 1):
            for key, F in tests.items():
                emp[key][r, t] = float(np.mean(F(inst.x0, state.x_t)))
            if t < T:
                state = amp_step(state, inst.Y, lambda y: schedule.f(t, y), lambda y: schedule.df(t, y))
    pred = {k: np.array([se_expectation(F, a, q) for a, q in zip(se.a, se.q)]) for k, F in tests.items()}
    mean = {k: v.mean(axis=0) for k, v in emp.items()}
    se_err = {k: v.std(axis=0, ddof=1) / np.sqrt(reps) if reps > 1 else np.zeros(T + 1) for k, v in emp.items()}
    dev = {k: np.abs(mean[k] - pred[k]) for k in tests}
    return SeComparison(se, mean, pred, dev, se_err)


def onsager_ablation(n: int, T: int, reps: int, rng) -> tuple[float, float]:
    """Mean ``|(1/n)||x_T||^2 - q_T|`` with and without the Onsager term at ``lam = 0``.

    Uses ``f = tanh`` and a standard normal start. Returns
    ``(corrected, uncorrected)`` deviations averaged over replicates.
    """
    sched = NonlinearitySchedule.tanh()
    se = state_evolution(0.0, sched, 0.0, 1.0, T)
    dev = np.zeros((reps, 2))
    for r in range(reps):
        gen = as_generator(rng.child(r) if hasattr(rng, "child") else rng)
        inst = sample_instance(n, 0.0, gen)
        x_init = gen.standard_normal(n)
        for j, ons in enumerate((True, False)):
            run = run_amp(inst, sched, x_init, T, onsager=ons)
            dev[r, j] = abs(run.sqnorm[T] - se.q[T])
    return float(dev[:, 0].mean()), float(dev[:, 1].mean())

"""Canonical phase space and the Poisson-bracket engine.

The bracket is the canonical one, ``{q_i, p_j} = delta_ij``::

    {f, g} = sum_k (df/dq_k dg/dp_k - df/dp_k dg/dq_k)

Observables may be scalar or array valued. For array-valued observables the
gradient has shape ``(n,) + value.shape`` in each of q and p.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .elliptic import SeriesControl, sigma, xi
from .errors import DerivativeMismatch, SingularConfiguration

__all__ = [
    "PhasePoint",
    "Observable",
    "BracketMethod",
    "random_phase_point",
    "gradient",
    "poisson_bracket",
    "bracket_matrix",
    "bracket_tensor",
    "poisson_map",
    "poisson_map_shift_grad",
    "bracket_from_grads",
    "symplectic_residual",
    "symplectic_form",
]


@dataclass(frozen=True)
class PhasePoint:
    """Canonical coordinates ``q`` and momenta ``p`` of ``n`` particles."""

    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        q = np.atleast_1d(np.asarray(self.q))
        p = np.atleast_1d(np.asarray(self.p))
        if q.shape != p.shape or q.ndim != 1:
            raise ValueError("q and p must be 1-d arrays of equal length")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    @property
    def n(self) -> int:
        return self.q.shape[0]

    def shifted(self, dq=None, dp=None) -> "PhasePoint":
        q = self.q if dq is None else self.q + dq
        p = self.p if dp is None else self.p + dp
        return PhasePoint(q, p)

    def check_generic(self, tau, floor: float = 1e-6, ctl: SeriesControl | None = None):
        """Raise :class:`SingularConfiguration` if some ``|sigma(q_i - q_j)|`` is below ``floor``."""
        n = self.n
        if n < 2:
            return
        i, j = np.triu_indices(n, 1)
        s = np.abs(sigma(self.q[i] - self.q[j], tau, ctl))
        if np.min(s) < floor:
            raise SingularConfiguration(
                f"min |sigma(q_ij)| = {np.min(s):.3e} below floor {floor:g}"
            )


@dataclass
class Observable:
    """Phase-space function with an optional analytic gradient.

    Parameters
    ----------
    evaluator : callable
        ``PhasePoint -> value`` (scalar or array).
    analytic_grad : callable, optional
        ``PhasePoint -> (dq, dp)`` with leading axis of length ``n``.
    """

    evaluator: Callable[[PhasePoint], object]
    analytic_grad: Optional[Callable[[PhasePoint], tuple]] = None

    def __call__(self, x: PhasePoint):
        return self.evaluator(x)


@dataclass(frozen=True)
class BracketMethod:
    """How gradients are obtained.

    ``mode`` is one of ``"analytic"``, ``"finite_difference"`` or
    ``"cross_check"``. Cross-checking computes both and raises
    :class:`DerivativeMismatch` when they differ by more than
    ``cross_tol`` relative to the gradient scale.
    """

    mode: str = "analytic"
    fd_step: float = 1e-5
    richardson: bool = True
    cross_tol: float = 1e-6

    def __post_init__(self):
        if self.mode not in ("analytic", "finite_difference", "cross_check"):
            raise ValueError(f"unknown bracket mode {self.mode!r}")
        if not self.fd_step > 0:
            raise ValueError("fd_step must be positive")


ANALYTIC = BracketMethod("analytic")
FINITE_DIFFERENCE = BracketMethod("finite_difference")


def random_phase_point(rng: np.random.Generator, n: int, spacing: float = 0.15,
                       p_range: float = 1.0) -> PhasePoint:
    """Draw a generic point with sorted ``q`` in (0, 1) and ``p`` in ``[-p_range, p_range]``.

    Positions are separated by at least ``spacing`` and the spread
    ``q_n - q_1`` stays below ``1 - spacing``, so every ``q_i - q_j`` keeps
    that distance from the real zeros of sigma. For large ``n`` the
    spacing is reduced to ``0.6 / n``.
    """
    d = min(spacing, 0.6 / n)
    free = 1.0 - n * d
    base = np.sort(rng.uniform(0.0, free, n))
    q = base + d * np.arange(n) + 0.5 * d
    p = rng.uniform(-p_range, p_range, n)
    return PhasePoint(q, p)


def _fd_grad(f: Callable, x: PhasePoint, h: float, richardson: bool):
    n = x.n
    f0 = np.asarray(f(x))
    dq = np.zeros((n,) + f0.shape, dtype=complex)
    dp = np.zeros((n,) + f0.shape, dtype=complex)

    def central(k, which, step):
        e = np.zeros(n)
        e[k] = step
        if which == 0:
            plus, minus = x.shifted(dq=e), x.shifted(dq=-e)
        else:
            plus, minus = x.shifted(dp=e), x.shifted(dp=-e)
        return (np.asarray(f(plus)) - np.asarray(f(minus))) / (2 * step)

    for k in range(n):
        for which, out in ((0, dq), (1, dp)):
            d1 = central(k, which, h)
            if richardson:
                d2 = central(k, which, h / 2)
                out[k] = (4 * d2 - d1) / 3
            else:
                out[k] = d1
    return dq, dp


def gradient(f, x: PhasePoint, m: BracketMethod = ANALYTIC):
    """Gradient ``(dq, dp)`` of an observable or plain callable."""
    obs = f if isinstance(f, Observable) else Observable(f)
    if m.mode == "finite_difference" or obs.analytic_grad is None:
        if m.mode == "cross_check" and obs.analytic_grad is None:
            raise DerivativeMismatch("cross_check requested but no analytic gradient given")
        return _fd_grad(obs.evaluator, x, m.fd_step, m.richardson)
    dq, dp = obs.analytic_grad(x)
    dq = np.asarray(dq, dtype=complex)
    dp = np.asarray(dp, dtype=complex)
    if m.mode == "cross_check":
        fq, fp = _fd_grad(obs.evaluator, x, m.fd_step, m.richardson)
        scale = max(np.abs(dq).max(initial=0), np.abs(dp).max(initial=0), 1.0)
        err = max(np.abs(dq - fq).max(initial=0), np.abs(dp - fp).max(initial=0)) / scale
        if err > m.cross_tol:
            raise DerivativeMismatch(
                f"analytic and finite-difference gradients differ by {err:.3e} "
                f"(tolerance {m.cross_tol:g})"
            )
    return dq, dp


def bracket_from_grads(ga, gb):
    """Bracket of two observables given their gradients.

    The result has shape ``shape_a + shape_b``.
    """
    aq, ap = ga
    bq, bp = gb
    sa = aq.shape[1:]
    sb = bq.shape[1:]
    n = aq.shape[0]
    A_q = aq.reshape(n, -1)
    A_p = ap.reshape(n, -1)
    B_q = bq.reshape(n, -1)
    B_p = bp.reshape(n, -1)
    out = A_q.T @ B_p - A_p.T @ B_q
    return out.reshape(sa + sb)


def poisson_bracket(f, g, x: PhasePoint, m: BracketMethod = ANALYTIC):
    """Canonical Poisson bracket ``{f, g}`` at ``x``.

    Examples
    --------
    >>> x = PhasePoint([0.2, 0.5], [0.1, -0.3])
    >>> q1 = Observable(lambda y: y.q[0], lambda y: (np.array([1.0, 0]), np.zeros(2)))
    >>> p1 = Observable(lambda y: y.p[0], lambda y: (np.zeros(2), np.array([1.0, 0])))
    >>> complex(poisson_bracket(q1, p1, x))
    (1+0j)
    """
    out = bracket_from_grads(gradient(f, x, m), gradient(g, x, m))
    return out[()] if out.ndim == 0 else out


def bracket_tensor(ga, gb) -> np.ndarray:
    """Doubled-space tensor from the gradients of two square matrices.

    Entry ``[rho*n + delta, alpha*n + beta]`` is ``{F^rho_alpha, G^delta_beta}``.
    """
    b = bracket_from_grads(ga, gb)  # [rho, alpha, delta, beta]
    n = b.shape[0]
    return b.transpose(0, 2, 1, 3).reshape(n * n, n * n)


def bracket_matrix(F, G, x: PhasePoint, m: BracketMethod = ANALYTIC) -> np.ndarray:
    """``{F_1, G_2}`` for matrix-valued observables, as an ``n^2 x n^2`` array."""
    return bracket_tensor(gradient(F, x, m), gradient(G, x, m))


def poisson_map(x: PhasePoint, gamma, tau, ctl: SeriesControl | None = None) -> PhasePoint:
    """Momentum shift ``p_i -> p_i + 1/2 sum_k [log sigma(q_ik + gamma) - log sigma(q_ik - gamma)]``.

    The logarithm is taken factor by factor on the principal branch, so the
    momenta may become complex. The inverse is the same map with
    ``-gamma``.

    Raises
    ------
    SingularConfiguration
        If any of the sigma factors vanishes.
    """
    q = x.q
    n = x.n
    shift = np.zeros(n, dtype=complex)
    for i in range(n):
        k = np.array([k for k in range(n) if k != i], dtype=int)
        if k.size == 0:
            continue
        a = sigma(q[i] - q[k] + gamma, tau, ctl)
        b = sigma(q[i] - q[k] - gamma, tau, ctl)
        if np.min(np.abs(a)) == 0 or np.min(np.abs(b)) == 0:
            raise SingularConfiguration("vanishing sigma factor in the Poisson map")
        shift[i] = 0.5 * np.sum(np.log(a) - np.log(b))
    return PhasePoint(q, x.p + shift)


def poisson_map_shift_grad(q, gamma, tau, ctl: SeriesControl | None = None) -> np.ndarray:
    """Jacobian ``d(shift_i)/d(q_m)`` of the momentum shift of :func:`poisson_map`."""
    q = np.asarray(q)
    n = q.shape[0]
    J = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for k in range(n):
            if k == i:
                continue
            w = 0.5 * (xi(q[i] - q[k] + gamma, tau, ctl) - xi(q[i] - q[k] - gamma, tau, ctl))
            J[i, i] += w
            J[i, k] -= w
    return J


def symplectic_form(n: int) -> np.ndarray:
    """Standard form ``Omega`` on coordinates ordered ``(q, p)``."""
    I = np.eye(n)
    Z = np.zeros((n, n))
    return np.block([[Z, I], [-I, Z]])


def symplectic_residual(phase_map: Callable[[PhasePoint], PhasePoint], x: PhasePoint,
                        step: float = 1e-5) -> float:
    """``||J^T Omega J - Omega||_F`` for the finite-difference Jacobian ``J`` of the map.

    Central differences with one Richardson level are used.
    """
    n = x.n

    def flat(y):
        return np.concatenate([np.asarray(y.q, dtype=complex), np.asarray(y.p, dtype=complex)])

    def col(k, h):
        e = np.zeros(2 * n)
        e[k] = h
        plus = phase_map(x.shifted(dq=e[:n], dp=e[n:]))
        minus = phase_map(x.shifted(dq=-e[:n], dp=-e[n:]))
        return (flat(plus) - flat(minus)) / (2 * h)

    J = np.empty((2 * n, 2 * n), dtype=complex)
    for k in range(2 * n):
        J[:, k] = (4 * col(k, step / 2) - col(k, step)) / 3
    Om = symplectic_form(n)
    return float(np.linalg.norm(J.T @ Om @ J - Om))

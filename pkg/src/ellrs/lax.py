"""Intertwiner, gauge matrix and the Lax operators of the elliptic RS model.

Conventions
-----------
``q_ij = q_i - q_j``. Matrices are indexed ``M[i, j] = M^i_j`` (row, column).
The intertwiner is ``A(u; q)^i_j = theta^{(i)}(u + n q_j - sum_k q_k + (n-1)/2)``.

Three Lax operators are provided:

* :func:`lax_ruijsenaars` -- the form with square roots,
* :func:`lax_nijhoff` -- the root-free form,
* :func:`lax_factorized` -- ``sigma(gamma)^{-1} A(u + n gamma) e^P A(u)^{-1}``.

The factorized operator equals ``g L_nijhoff g^{-1}`` with
``g = A(u) diag(h)``, ``h_i = 1 / prod_{l != i} sigma(q_il)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .elliptic import (
    DEFAULT_CONTROL,
    SeriesControl,
    as_modulus,
    d2_theta_j,
    d_theta_j,
    d_xi,
    sigma,
    theta_j,
    xi,
)
from .errors import DegenerateTuple, IllConditioned, SingularConfiguration, SpectralPole
from .phase import PhasePoint

__all__ = [
    "ModelParams",
    "LaxMatrix",
    "intertwiner_A",
    "intertwiner_dq",
    "intertwiner_du",
    "gauge_g",
    "gauge_g_grad",
    "lax_ruijsenaars",
    "lax_nijhoff",
    "lax_nijhoff_grad",
    "lax_nijhoff_dgamma",
    "lax_factorized",
    "lax_factorized_grad",
    "hamiltonian",
    "hamiltonian_grad",
    "trace_power",
    "trace_power_grad",
    "cm_momentum_shift",
    "lax_cm",
    "lax_cm_grad",
    "lax_cm_limit",
    "vandermonde_lhs",
    "vandermonde_rhs",
    "vandermonde_constant",
    "vandermonde_check",
    "VANDERMONDE_BASE",
    "COND_LIMIT",
]

COND_LIMIT = 1e12
SPECTRAL_FLOOR = 1e-10


@dataclass(frozen=True)
class ModelParams:
    """Model parameters.

    Parameters
    ----------
    n : int
        Number of particles, at least 2.
    tau : complex
        Modular parameter, ``Im(tau) > 0``.
    gamma : complex
        Coupling constant.
    hbar : float
        Planck constant (crossing parameter ``i hbar`` of the quantum R-matrix).
    mc2 : float
        Rest energy scale of the Hamiltonian.
    ctl : SeriesControl
        Truncation policy for all theta evaluations.
    """

    n: int = 3
    tau: complex = 1j
    gamma: complex = 0.21 + 0.13j
    hbar: float = 0.1
    mc2: float = 1.0
    ctl: SeriesControl = field(default=DEFAULT_CONTROL)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"n must be an integer >= 2, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "tau", as_modulus(self.tau).tau)
        object.__setattr__(self, "gamma", complex(self.gamma))
        if abs(sigma(self.gamma, self.tau, self.ctl)) < SPECTRAL_FLOOR:
            raise SingularConfiguration("gamma lies on the sigma-zero lattice")

    def with_(self, **kw) -> "ModelParams":
        d = dict(n=self.n, tau=self.tau, gamma=self.gamma, hbar=self.hbar, mc2=self.mc2, ctl=self.ctl)
        d.update(kw)
        return ModelParams(**d)


@dataclass(frozen=True)
class LaxMatrix:
    """Lax matrix entries with their spectral parameter and kind."""

    entries: np.ndarray
    u: complex
    kind: str
    cond: float | None = None

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


def _q(x) -> np.ndarray:
    return np.asarray(x.q if isinstance(x, PhasePoint) else x)


def _p(x) -> np.ndarray:
    return np.asarray(x.p)


def _diffs(q):
    """``D[i, j] = q_i - q_j``."""
    return q[:, None] - q[None, :]


def _offdiag(q):
    """``q_i - q_j`` with a harmless placeholder (0.5, away from sigma zeros) on the diagonal."""
    return _diffs(q) + 0.5 * np.eye(q.shape[0])


def _A_args(u, q):
    n = q.shape[0]
    return u + n * q - q.sum() + (n - 1) / 2


def _A_table(fn, u, q, P: ModelParams):
    n = q.shape[0]
    args = _A_args(u, q)
    return np.array([fn(i, args, n, P.tau, P.ctl) for i in range(n)])


def intertwiner_A(u, x, P: ModelParams) -> np.ndarray:
    """Intertwiner ``A(u; q)``; rows follow the theta index, columns the particle."""
    return _A_table(theta_j, u, _q(x), P)


def intertwiner_du(u, x, P: ModelParams, order: int = 1) -> np.ndarray:
    """``d^order A / du^order``."""
    fn = {1: d_theta_j, 2: d2_theta_j}[order]
    return _A_table(fn, u, _q(x), P)


def intertwiner_dq(u, x, P: ModelParams, du_order: int = 0) -> np.ndarray:
    """``dA/dq_m`` stacked along the first axis (optionally of ``d^k A / du^k``).

    Column ``j`` of ``A`` depends on ``q`` through ``n q_j - sum q``, so
    ``d/dq_m`` multiplies it by ``n delta_jm - 1``.
    """
    q = _q(x)
    n = q.shape[0]
    fn = {0: d_theta_j, 1: d2_theta_j}[du_order]
    D = _A_table(fn, u, q, P)
    fac = n * np.eye(n) - 1.0  # fac[m, j]
    return D[None, :, :] * fac[:, None, :]


def _inv(M, what="A"):
    c = np.linalg.cond(M)
    if not np.isfinite(c) or c > COND_LIMIT:
        raise IllConditioned(f"condition number of {what} is {c:.3e} > {COND_LIMIT:g}")
    return np.linalg.inv(M), c


def _h(q, P):
    S = sigma(_offdiag(q), P.tau, P.ctl)
    np.fill_diagonal(S, 1.0)
    if np.min(np.abs(S)) < SPECTRAL_FLOOR:
        raise SingularConfiguration("coincident positions in gauge factor")
    return 1.0 / np.prod(S, axis=1)


def gauge_g(u, x, P: ModelParams) -> np.ndarray:
    """Gauge matrix ``g(u) = A(u; q) diag(h)`` with ``h_i = 1/prod_{l != i} sigma(q_il)``."""
    q = _q(x)
    return intertwiner_A(u, q, P) * _h(q, P)[None, :]


def gauge_g_grad(u, x, P: ModelParams):
    """Analytic ``(dq, dp)`` of :func:`gauge_g`; the p-part vanishes."""
    q = _q(x)
    n = q.shape[0]
    A = intertwiner_A(u, q, P)
    dA = intertwiner_dq(u, q, P)
    h = _h(q, P)
    Xi = xi(_offdiag(q), P.tau, P.ctl)
    np.fill_diagonal(Xi, 0.0)
    # d ln h_i / dq_m = -sum_{l != i} xi(q_il) (delta_im - delta_lm)
    dlnh = np.zeros((n, n), dtype=complex)  # [m, i]
    for m in range(n):
        dlnh[m] = -(Xi.sum(axis=1) * (np.arange(n) == m)) + Xi[:, m]
    dq = dA * h[None, None, :] + A[None, :, :] * (h[None, :] * dlnh)[:, None, :]
    return dq, np.zeros_like(dq)


def _spectral(u, P):
    s = sigma(u, P.tau, P.ctl)
    if abs(s) < SPECTRAL_FLOOR:
        raise SpectralPole(f"sigma(u) vanishes at u={u}")
    return s


def _nijhoff_parts(u, q, P):
    """Return (C, w) with ``L^i_j = e^{p_j} C[i, j] w[j]``."""
    n = q.shape[0]
    g = P.gamma
    Dji = _diffs(q).T  # [i, j] -> q_j - q_i
    su = _spectral(u, P)
    den = sigma(g + Dji, P.tau, P.ctl)
    if np.min(np.abs(den)) < SPECTRAL_FLOOR:
        raise SingularConfiguration("gamma + q_ji on the sigma-zero lattice")
    C = sigma(g + u + Dji, P.tau, P.ctl) / (su * den)
    Djk = _diffs(q)
    num = sigma(g + Djk, P.tau, P.ctl)
    dd = sigma(_offdiag(q), P.tau, P.ctl)
    ratio = num / np.where(np.eye(n, dtype=bool), 1.0, dd)
    np.fill_diagonal(ratio, 1.0)
    if np.min(np.abs(np.where(np.eye(n, dtype=bool), 1.0, dd))) < SPECTRAL_FLOOR:
        raise SingularConfiguration("coincident positions")
    w = np.prod(ratio, axis=1)
    return C, w


def lax_nijhoff(u, x: PhasePoint, P: ModelParams) -> LaxMatrix:
    """Root-free Lax operator.

    ``L^i_j = e^{p_j} sigma(gamma + u + q_ji) / (sigma(u) sigma(gamma + q_ji))
    prod_{k != j} sigma(gamma + q_jk) / sigma(q_jk)``.
    """
    q = _q(x)
    C, w = _nijhoff_parts(u, q, P)
    L = C * (np.exp(_p(x)) * w)[None, :]
    return LaxMatrix(L, complex(u), "Nijhoff")


def lax_nijhoff_grad(u, x: PhasePoint, P: ModelParams):
    """Analytic ``(dq, dp)`` of :func:`lax_nijhoff`."""
    q = _q(x)
    n = q.shape[0]
    g = P.gamma
    L = lax_nijhoff(u, x, P).entries
    Dji = _diffs(q).T
    a = xi(g + u + Dji, P.tau, P.ctl) - xi(g + Dji, P.tau, P.ctl)  # [i, j]
    Djk = _diffs(q)
    b = xi(g + Djk, P.tau, P.ctl) - xi(_offdiag(q), P.tau, P.ctl)
    np.fill_diagonal(b, 0.0)  # b[j, k]
    eye = np.eye(n)
    dq = np.empty((n, n, n), dtype=complex)
    for m in range(n):
        # d ln L^i_j / dq_m = a_ij (d_jm - d_im) + sum_k b_jk (d_jm - d_km)
        t1 = a * (eye[m][None, :] - eye[m][:, None])
        t2 = (b.sum(axis=1) * eye[m] - b[:, m])[None, :]
        dq[m] = L * (t1 + t2)
    dp = np.einsum("mj,ij->mij", eye, L)
    return dq, dp


def lax_nijhoff_dgamma(u, x: PhasePoint, P: ModelParams) -> np.ndarray:
    """Analytic ``d L_nijhoff / d gamma``."""
    q = _q(x)
    g = P.gamma
    L = lax_nijhoff(u, x, P).entries
    Dji = _diffs(q).T
    a = xi(g + u + Dji, P.tau, P.ctl) - xi(g + Dji, P.tau, P.ctl)
    X = xi(g + _diffs(q), P.tau, P.ctl)
    np.fill_diagonal(X, 0.0)
    return L * (a + X.sum(axis=1)[None, :])


def lax_ruijsenaars(u, x: PhasePoint, P: ModelParams) -> LaxMatrix:
    """Lax operator with square-root factors.

    ``L^i_j = e^{p_j} sigma(gamma + u + q_ji) / (sigma(gamma + q_ji) sigma(u))
    prod_{k != j} sqrt(sigma(q_jk + gamma)) sqrt(sigma(q_jk - gamma)) / sigma(q_jk)``.

    Each root is principal; see :func:`hamiltonian` for why the roots are
    taken factor by factor.
    """
    q = _q(x)
    C, _ = _nijhoff_parts(u, q, P)
    f = _root_factors(q, P)
    L = C * (np.exp(_p(x)) * f)[None, :]
    return LaxMatrix(L, complex(u), "Ruijsenaars")


def _root_factors(q, P):
    n = q.shape[0]
    g = P.gamma
    D = _diffs(q)
    eye = np.eye(n, dtype=bool)
    sp = sigma(D + g, P.tau, P.ctl)
    sm = sigma(D - g, P.tau, P.ctl)
    s0 = sigma(_offdiag(q), P.tau, P.ctl)
    if np.min(np.abs(np.where(eye, 1.0, s0))) < SPECTRAL_FLOOR:
        raise SingularConfiguration("coincident positions")
    r = np.sqrt(sp) * np.sqrt(sm) / s0
    r[eye] = 1.0
    return np.prod(r, axis=1)


def hamiltonian(x: PhasePoint, P: ModelParams) -> complex:
    """``H = mc2 sum_j cosh(p_j) prod_{k != j} {sigma(q_jk + gamma) sigma(q_jk - gamma) / sigma(q_jk)^2}^(1/2)``.

    The square root is evaluated as ``sqrt(sigma(q_jk+gamma)) sqrt(sigma(q_jk-gamma)) / sigma(q_jk)``
    with principal roots. This is the branch that pairs with the
    factor-wise logarithm in :func:`ellrs.phase.poisson_map`; with it
    ``H`` Poisson-commutes with the trace invariants. The principal
    root of the full product picks inconsistent signs once ``n >= 3``.
    """
    q = _q(x)
    f = _root_factors(q, P)
    return complex(P.mc2 * np.sum(np.cosh(_p(x)) * f))


def hamiltonian_grad(x: PhasePoint, P: ModelParams):
    """Analytic gradient of :func:`hamiltonian`."""
    q = _q(x)
    p = _p(x)
    n = q.shape[0]
    g = P.gamma
    f = _root_factors(q, P)
    D = _diffs(q)
    eye = np.eye(n, dtype=bool)
    c = 0.5 * (xi(D + g, P.tau, P.ctl) + xi(D - g, P.tau, P.ctl)) - xi(_offdiag(q), P.tau, P.ctl)
    c[eye] = 0.0  # c[j, k] = d ln f_j / d q_jk
    dlnf = np.diag(c.sum(axis=1)) - c  # [j, m]
    dq = P.mc2 * (np.cosh(p) * f) @ dlnf
    dp = P.mc2 * np.sinh(p) * f
    return dq, dp


def lax_factorized(u, x: PhasePoint, P: ModelParams) -> LaxMatrix:
    """``L(u) = sigma(gamma)^{-1} A(u + n gamma) diag(e^p) A(u)^{-1}``.

    Raises
    ------
    IllConditioned
        If ``A(u)`` has condition number above ``COND_LIMIT``.
    """
    q = _q(x)
    n = q.shape[0]
    _spectral(u, P)
    Ap = intertwiner_A(u + n * P.gamma, q, P)
    Ai, c = _inv(intertwiner_A(u, q, P))
    L = (Ap * np.exp(_p(x))[None, :]) @ Ai / sigma(P.gamma, P.tau, P.ctl)
    return LaxMatrix(L, complex(u), "Factorized", c)


def lax_factorized_grad(u, x: PhasePoint, P: ModelParams):
    """Analytic ``(dq, dp)`` of :func:`lax_factorized`."""
    q = _q(x)
    n = q.shape[0]
    up = u + n * P.gamma
    Ap = intertwiner_A(up, q, P)
    Ai, _ = _inv(intertwiner_A(u, q, P))
    dAp = intertwiner_dq(up, q, P)
    dAu = intertwiner_dq(u, q, P)
    E = np.exp(_p(x))
    sg = sigma(P.gamma, P.tau, P.ctl)
    L = (Ap * E[None, :]) @ Ai / sg
    dq = np.array([((dAp[m] * E[None, :]) @ Ai) / sg - L @ dAu[m] @ Ai for m in range(n)])
    dp = np.einsum("ik,kj->kij", Ap, Ai) * (E / sg)[:, None, None]
    return dq, dp


def trace_power(u, l: int, x: PhasePoint, P: ModelParams) -> complex:
    """``tr L(u)^l`` of the factorized operator."""
    if l < 1:
        raise ValueError("l must be a positive integer")
    L = lax_factorized(u, x, P).entries
    return complex(np.trace(np.linalg.matrix_power(L, l)))


def trace_power_grad(u, l: int, x: PhasePoint, P: ModelParams):
    """Gradient of :func:`trace_power`, ``l tr(L^{l-1} dL)``."""
    L = lax_factorized(u, x, P).entries
    dq, dp = lax_factorized_grad(u, x, P)
    Lm = np.linalg.matrix_power(L, l - 1)
    return (l * np.einsum("ji,mij->m", Lm, dq), l * np.einsum("ji,mij->m", Lm, dp))


def cm_momentum_shift(q, s: float, P: ModelParams) -> np.ndarray:
    """``(s/n) d ln M / d q_i`` with ``M = prod_{i<j} sigma(q_ij)``."""
    q = np.asarray(q)
    n = q.shape[0]
    X = xi(_offdiag(q), P.tau, P.ctl)
    np.fill_diagonal(X, 0.0)
    return (s / n) * X.sum(axis=1)


def lax_cm(u, x_prime: PhasePoint, s: float, P: ModelParams) -> LaxMatrix:
    """Calogero-Moser Lax operator ``A(u) diag(p') A(u)^{-1} - s A'(u) A(u)^{-1}``.

    The momenta are first shifted, ``p'_i -> p'_i - (s/n) d ln M / d q_i``.
    It is the first-order coefficient of ``-(L'(u) - 1)/beta`` where
    ``L' = sigma(gamma) L``, ``p = -beta p'`` and ``n gamma = beta s``
    (see :func:`lax_cm_limit`).
    """
    q = _q(x_prime)
    A = intertwiner_A(u, q, P)
    Ai, c = _inv(A)
    ps = np.asarray(x_prime.p) - cm_momentum_shift(q, s, P)
    L = (A * ps[None, :]) @ Ai - s * intertwiner_du(u, q, P) @ Ai
    return LaxMatrix(L, complex(u), "CM", c)


def lax_cm_grad(u, x_prime: PhasePoint, s: float, P: ModelParams):
    """Analytic ``(dq, dp)`` of :func:`lax_cm` in the primed canonical variables."""
    q = _q(x_prime)
    n = q.shape[0]
    A = intertwiner_A(u, q, P)
    Ai, _ = _inv(A)
    Au = intertwiner_du(u, q, P)
    dA = intertwiner_dq(u, q, P)
    dAu = intertwiner_dq(u, q, P, du_order=1)
    ps = np.asarray(x_prime.p) - cm_momentum_shift(q, s, P)
    X1 = d_xi(_offdiag(q), P.tau, P.ctl)
    np.fill_diagonal(X1, 0.0)
    # d shift_k / d q_m = (s/n) sum_{j != k} xi'(q_kj) (delta_km - delta_jm)
    dshift = (s / n) * (np.diag(X1.sum(axis=1)) - X1)  # [k, m]
    dq = np.empty((n, n, n), dtype=complex)
    for m in range(n):
        dAi = -Ai @ dA[m] @ Ai
        t1 = (dA[m] * ps[None, :]) @ Ai - (A * dshift[:, m][None, :]) @ Ai + (A * ps[None, :]) @ dAi
        t2 = dAu[m] @ Ai + Au @ dAi
        dq[m] = t1 - s * t2
    dp = np.einsum("ik,kj->kij", A, Ai)
    return dq, dp


def lax_cm_limit(u, x_prime: PhasePoint, s: float, beta: float, P: ModelParams) -> np.ndarray:
    """Finite-beta evaluator ``-(L'(u) - 1)/beta`` approximating :func:`lax_cm`.

    ``L' = A(u + beta s) diag(exp(-beta p'_shifted)) A(u)^{-1}``, which is
    ``sigma(gamma) L(u)`` at ``n gamma = beta s`` and ``p = -beta p'``.
    """
    q = _q(x_prime)
    n = q.shape[0]
    ps = np.asarray(x_prime.p) - cm_momentum_shift(q, s, P)
    A_shift = intertwiner_A(u + beta * s, q, P)
    Ai, _ = _inv(intertwiner_A(u, q, P))
    Lp = (A_shift * np.exp(-beta * ps)[None, :]) @ Ai
    return -(Lp - np.eye(n)) / beta


VANDERMONDE_BASE = 0.05


def vandermonde_lhs(u_list, P: ModelParams) -> complex:
    """``det[theta^{(j)}(u_k)]`` with rows ``j`` and columns ``k``."""
    u = np.asarray(u_list, dtype=complex)
    n = u.shape[0]
    M = np.array([theta_j(j, u, n, P.tau, P.ctl) for j in range(n)])
    return complex(np.linalg.det(M))


def vandermonde_rhs(u_list, P: ModelParams) -> complex:
    """``sigma(sum u_k / n - (n-1)/2) prod_{j<k} sigma((u_k - u_j)/n)`` (constant omitted)."""
    u = np.asarray(u_list, dtype=complex)
    n = u.shape[0]
    j, k = np.triu_indices(n, 1)
    factors = np.append(sigma((u[k] - u[j]) / n, P.tau, P.ctl),
                        sigma(u.sum() / n - (n - 1) / 2, P.tau, P.ctl))
    if np.min(np.abs(factors)) < SPECTRAL_FLOOR:
        raise DegenerateTuple("a sigma factor of the right-hand side vanishes")
    return complex(np.prod(factors))


def vandermonde_constant(n: int, P: ModelParams, base=None) -> complex:
    """Calibrate the constant at ``base`` (default ``u_k = 0.1 k + 0.05``, ``k = 1..n``)."""
    if base is None:
        base = 0.1 * np.arange(1, n + 1) + VANDERMONDE_BASE
    rhs = vandermonde_rhs(base, P)
    return vandermonde_lhs(base, P) / rhs


def vandermonde_check(u_list, P: ModelParams, const: complex | None = None) -> float:
    """``|det / (Const * RHS) - 1|`` after calibrating ``Const`` once.

    Raises
    ------
    DegenerateTuple
        If the right-hand side vanishes.
    """
    u = np.asarray(u_list, dtype=complex)
    n = u.shape[0]
    if const is None:
        const = vandermonde_constant(n, P)
    rhs = vandermonde_rhs(u, P)
    return float(abs(vandermonde_lhs(u, P) / (const * rhs) - 1.0))

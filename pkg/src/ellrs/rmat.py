"""Classical and quantum r-matrices, the dynamical quadruple and the twisting engine.

Tensor layout
-------------
Operators on ``C^n (x) C^n`` are dense ``n^2 x n^2`` arrays with the
composite index ``(a, b) -> a*n + b``, so ``kron(X, Y)`` is ``X_1 Y_2``.

For the Z_n-symmetric tensors the coefficient written ``r^{lk}_{ij}`` (and
likewise ``R^{lk}_{ij}``) is stored at row ``(i, j)``, column ``(l, k)``,
i.e. ``r = sum r^{lk}_{ij} e_{il} (x) e_{jk}``. With this placement the
classical r-matrix governs the bracket of the factorized Lax operator and
the quantum R-matrix satisfies the face-vertex identity
(:func:`ellrs.verify.check_TG_identity`); see ``README.md``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .elliptic import d_sigma, d_theta_j, sigma, theta_j, xi
from .errors import DerivativeMismatch, SpectralPole
from .lax import (
    ModelParams,
    gauge_g,
    gauge_g_grad,
    lax_factorized,
    lax_nijhoff,
    lax_nijhoff_dgamma,
    lax_nijhoff_grad,
)
from .phase import BracketMethod, Observable, PhasePoint, bracket_matrix

__all__ = [
    "RTensor",
    "ClockShift",
    "clock_shift",
    "unit",
    "permutation",
    "swap",
    "embed",
    "classical_r",
    "quantum_R",
    "cybe_residual",
    "qybe_residual",
    "classical_limit_data",
    "classical_limit_residual",
    "S12_VARIANTS",
    "a12",
    "r0",
    "u_plus",
    "u_minus",
    "s12",
    "dynamical_quadruple",
    "twist_delta",
    "twisted_quadruple",
    "ORIENTATION",
]

SPECTRAL_FLOOR = 1e-10

# The r-matrix identities of this module hold for the Poisson bracket
# oriented as {p_i, q_j} = delta_ij. The bracket engine is canonical,
# {q_i, p_j} = delta_ij, so bracket-valued inputs are multiplied by this.
ORIENTATION = -1.0


@dataclass(frozen=True)
class RTensor:
    """Dense doubled-space tensor together with its spectral data and kind."""

    data: np.ndarray
    u: object
    kind: str

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.data, dtype=dtype)

    @property
    def n(self) -> int:
        return int(round(np.sqrt(self.data.shape[0])))


@dataclass(frozen=True)
class ClockShift:
    """Shift ``h`` (``h_ij = delta_{i+1, j}``) and clock ``g`` (``g_ij = omega^i delta_ij``)."""

    h: np.ndarray
    g: np.ndarray
    omega: complex

    def I_alpha(self, a1: int, a2: int) -> np.ndarray:
        """``g^{a2} h^{a1}``."""
        return np.linalg.matrix_power(self.g, a2 % len(self.g)) @ np.linalg.matrix_power(self.h, a1 % len(self.h))


def clock_shift(n: int) -> ClockShift:
    """Clock and shift matrices of order ``n``.

    Examples
    --------
    >>> cs = clock_shift(3)
    >>> bool(np.allclose(cs.h @ cs.g, cs.omega * cs.g @ cs.h))
    True
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    omega = np.exp(2j * np.pi / n)
    h = np.zeros((n, n), dtype=complex)
    for i in range(n):
        h[i, (i + 1) % n] = 1.0
    g = np.diag(omega ** np.arange(n))
    return ClockShift(h, g, omega)


def unit(i: int, j: int, n: int) -> np.ndarray:
    """Matrix unit ``e_ij``."""
    e = np.zeros((n, n))
    e[i, j] = 1.0
    return e


def permutation(n: int) -> np.ndarray:
    """Flip operator ``P (x (x) y) = y (x) x``."""
    P = np.zeros((n * n, n * n))
    for a in range(n):
        for b in range(n):
            P[b * n + a, a * n + b] = 1.0
    return P


def swap(t: np.ndarray) -> np.ndarray:
    """``t_21 = P t_12 P``."""
    n = int(round(np.sqrt(t.shape[0])))
    P = permutation(n)
    return P @ t @ P


def embed(t: np.ndarray, which: str) -> np.ndarray:
    """Embed a doubled-space tensor into the triple space as ``t_12``, ``t_13`` or ``t_23``."""
    t = np.asarray(t)
    n = int(round(np.sqrt(t.shape[0])))
    I = np.eye(n)
    if which == "12":
        return np.kron(t, I)
    if which == "23":
        return np.kron(I, t)
    if which == "13":
        T = t.reshape(n, n, n, n)  # [a, c, a', c']
        return np.einsum("acxz,by->abcxyz", T, I).reshape(n ** 3, n ** 3)
    raise ValueError(f"unknown slot {which!r}")


def _theta_tables(v, n, P):
    js = range(n)
    T = np.array([theta_j(j, v, n, P.tau, P.ctl) for j in js])
    dT = np.array([d_theta_j(j, v, n, P.tau, P.ctl) for j in js])
    return T, dT


def classical_r(v, P: ModelParams) -> RTensor:
    """Z_n-symmetric classical r-matrix.

    Nonzero only for ``i + j = l + k (mod n)``:

    ``r^{lk}_{ij} = (1 - delta_li) theta'^{(0)}(0) theta^{(i-j)}(v) / (theta^{(l-j)}(v) theta^{(i-l)}(0))
    + delta_li delta_kj (theta'^{(i-j)}(v)/theta^{(i-j)}(v) - sigma'(v)/sigma(v))``.

    Raises
    ------
    SpectralPole
        When ``v`` is within ``1e-10`` of a zero of ``sigma`` or of some ``theta^{(j)}``.
    """
    n = P.n
    T, dT = _theta_tables(v, n, P)
    sv = sigma(v, P.tau, P.ctl)
    if min(np.min(np.abs(T)), abs(sv)) < SPECTRAL_FLOOR:
        raise SpectralPole(f"classical r-matrix has a pole at v={v}")
    T0 = np.array([theta_j(j, 0.0, n, P.tau, P.ctl) for j in range(n)])
    c0 = d_theta_j(0, 0.0, n, P.tau, P.ctl)
    xv = d_sigma(v, P.tau, P.ctl) / sv
    r = np.zeros((n * n, n * n), dtype=complex)
    for i in range(n):
        for j in range(n):
            for l in range(n):
                k = (i + j - l) % n
                if l != i:
                    val = c0 * T[(i - j) % n] / (T[(l - j) % n] * T0[(i - l) % n])
                else:
                    val = dT[(i - j) % n] / T[(i - j) % n] - xv
                r[i * n + j, l * n + k] = val
    return RTensor(r, complex(v), "classical_r")


def quantum_R(v, P: ModelParams, hbar: float | None = None) -> RTensor:
    """Z_n-symmetric Belavin R-matrix with crossing parameter ``eta = i hbar``.

    ``R^{lk}_{ij} = theta'^{(0)}(0) sigma(v) sigma(eta) / (sigma'(0) theta^{(0)}(v) sigma(v + eta))
    * theta^{(0)}(v) theta^{(i-j)}(v + eta) / (theta^{(i-l)}(eta) theta^{(l-j)}(v))``
    for ``i + j = l + k (mod n)``. At ``hbar = 0`` the ratio
    ``sigma(eta)/theta^{(0)}(eta)`` is replaced by its limit, giving the identity.
    """
    n = P.n
    hb = P.hbar if hbar is None else hbar
    eta = 1j * hb
    T, _ = _theta_tables(v, n, P)
    Te, _ = _theta_tables(v + eta, n, P)
    sv = sigma(v, P.tau, P.ctl)
    sve = sigma(v + eta, P.tau, P.ctl)
    if min(np.min(np.abs(T)), abs(sv), abs(sve)) < SPECTRAL_FLOOR:
        raise SpectralPole(f"quantum R-matrix has a pole at v={v}")
    c0 = d_theta_j(0, 0.0, n, P.tau, P.ctl)
    ds0 = d_sigma(0.0, P.tau, P.ctl)
    se = sigma(eta, P.tau, P.ctl)
    Teta = np.array([theta_j(j, eta, n, P.tau, P.ctl) for j in range(n)])
    ratio = np.empty(n, dtype=complex)  # sigma(eta) / theta^{(m)}(eta)
    for m in range(n):
        if m == 0 and hb == 0:
            ratio[m] = ds0 / c0
        else:
            if abs(Teta[m]) < SPECTRAL_FLOOR:
                raise SpectralPole(f"theta^({m})(i hbar) vanishes")
            ratio[m] = se / Teta[m]
    pref = c0 * sv / (ds0 * sve)
    R = np.zeros((n * n, n * n), dtype=complex)
    for i in range(n):
        for j in range(n):
            for l in range(n):
                k = (i + j - l) % n
                R[i * n + j, l * n + k] = pref * ratio[(i - l) % n] * Te[(i - j) % n] / T[(l - j) % n]
    return RTensor(R, complex(v), "quantum_R")


def cybe_residual(v1, v2, v3, P: ModelParams) -> float:
    """``||[r12, r13] + [r12, r23] + [r13, r23]||_F / ||r12||_F^2``."""
    r12 = embed(classical_r(v1 - v2, P).data, "12")
    r13 = embed(classical_r(v1 - v3, P).data, "13")
    r23 = embed(classical_r(v2 - v3, P).data, "23")

    def c(a, b):
        return a @ b - b @ a

    X = c(r12, r13) + c(r12, r23) + c(r13, r23)
    return float(np.linalg.norm(X) / np.linalg.norm(r12) ** 2)


def qybe_residual(v1, v2, v3, P: ModelParams) -> float:
    """``||R12 R13 R23 - R23 R13 R12||_F / ||R12 R13 R23||_F``."""
    R12 = embed(quantum_R(v1 - v2, P).data, "12")
    R13 = embed(quantum_R(v1 - v3, P).data, "13")
    R23 = embed(quantum_R(v2 - v3, P).data, "23")
    lhs = R12 @ R13 @ R23
    return float(np.linalg.norm(lhs - R23 @ R13 @ R12) / np.linalg.norm(lhs))


def classical_limit_data(v, hbar_list, P: ModelParams) -> np.ndarray:
    """``||R(v; hbar) - 1 - i hbar r(v)||_F`` for each ``hbar``."""
    r = classical_r(v, P).data
    I = np.eye(P.n * P.n)
    return np.array([
        np.linalg.norm(quantum_R(v, P, hbar=h).data - I - 1j * h * r) for h in hbar_list
    ])


def classical_limit_residual(v, hbar_list, P: ModelParams) -> float:
    """Least-squares slope of ``log residual`` against ``log hbar``.

    Raises
    ------
    ValueError
        If ``hbar_list`` does not span at least two decades.
    """
    h = np.asarray(hbar_list, dtype=float)
    if h.min() <= 0 or np.log10(h.max() / h.min()) < 2 - 1e-12:
        raise ValueError("hbar_list must be positive and span at least two decades")
    res = classical_limit_data(v, h, P)
    slope = np.polyfit(np.log(h), np.log(res), 1)[0]
    return float(slope)


# --- dynamical quadruple -------------------------------------------------

S12_VARIANTS = ("a", "b", "c")


def _kron_units(coef: np.ndarray, pattern: str) -> np.ndarray:
    """Sum of ``coef[i, j]`` times a product of matrix units.

    ``pattern`` selects ``e_ij (x) e_ji`` ("swap"), ``e_ii (x) e_jj``
    ("diag") or ``e_ij (x) e_jj`` ("s").
    """
    n = coef.shape[0]
    out = np.zeros((n * n, n * n), dtype=complex)
    for i in range(n):
        for j in range(n):
            c = coef[i, j]
            if c == 0:
                continue
            if pattern == "swap":
                out[i * n + j, j * n + i] += c
            elif pattern == "diag":
                out[i * n + j, i * n + j] += c
            elif pattern == "s":
                out[i * n + j, j * n + j] += c
            else:
                raise ValueError(pattern)
    return out


def _qdiff(x):
    q = np.asarray(x.q)
    return q[:, None] - q[None, :]  # q_ij


def r0(u, v, x: PhasePoint, P: ModelParams) -> RTensor:
    """``sum_{i != j} sigma(q_ij + u - v) / (sigma(q_ij) sigma(u - v)) e_ij (x) e_ji``."""
    n = P.n
    D = _qdiff(x)
    w = u - v
    sw = sigma(w, P.tau, P.ctl)
    if abs(sw) < SPECTRAL_FLOOR:
        raise SpectralPole("u - v on the sigma-zero lattice")
    off = ~np.eye(n, dtype=bool)
    Dp = np.where(off, D, 0.5)
    coef = np.where(off, sigma(Dp + w, P.tau, P.ctl) / (sigma(Dp, P.tau, P.ctl) * sw), 0.0)
    return RTensor(_kron_units(coef, "swap"), (complex(u), complex(v)), "r0")


def a12(u, v, x: PhasePoint, P: ModelParams) -> RTensor:
    """``r0 + xi(u - v) sum_i e_ii (x) e_ii + sum_{i != j} xi(q_ij) e_ii (x) e_jj``."""
    n = P.n
    D = _qdiff(x)
    off = ~np.eye(n, dtype=bool)
    diag = np.where(off, xi(np.where(off, D, 0.5), P.tau, P.ctl), xi(u - v, P.tau, P.ctl))
    data = r0(u, v, x, P).data + _kron_units(diag, "diag")
    return RTensor(data, (complex(u), complex(v)), "a12")


def _u_pm(x, P, sign, kind):
    D = _qdiff(x).T  # [i, j] -> q_ji
    coef = xi(D + sign * P.gamma, P.tau, P.ctl)
    return RTensor(_kron_units(coef, "diag"), None, kind)


def u_plus(x: PhasePoint, P: ModelParams) -> RTensor:
    """``sum_{i,j} xi(q_ji + gamma) e_ii (x) e_jj`` (the ``i = j`` terms carry ``xi(gamma)``)."""
    return _u_pm(x, P, +1, "u_plus")


def u_minus(x: PhasePoint, P: ModelParams) -> RTensor:
    """``sum_{i,j} xi(q_ji - gamma) e_ii (x) e_jj``."""
    return _u_pm(x, P, -1, "u_minus")


def _dgamma_checked(u, x, P, tol=1e-8):
    """Analytic ``dL/dgamma`` of the root-free Lax operator, cross-checked by finite differences."""
    an = lax_nijhoff_dgamma(u, x, P)
    h = 1e-4

    def Lg(dg):
        return lax_nijhoff(u, x, P.with_(gamma=P.gamma + dg)).entries

    d1 = (Lg(h) - Lg(-h)) / (2 * h)
    d2 = (Lg(h / 2) - Lg(-h / 2)) / h
    fd = (4 * d2 - d1) / 3
    err = np.abs(an - fd).max() / max(np.abs(an).max(), 1.0)
    if err > tol:
        raise DerivativeMismatch(f"gamma-derivative check failed: {err:.3e} > {tol:g}")
    return an


def s12(u, x: PhasePoint, P: ModelParams, variant: str = "b") -> RTensor:
    """``sum_{i,j} S^i_j e_ij (x) e_jj`` built from the gamma-derivative of the root-free Lax operator.

    ``variant`` selects ``S``: ``"a"`` is ``L dL``, ``"b"`` is ``L^{-1} dL``,
    ``"c"`` is ``dL L^{-1}``, with ``dL = dL/dgamma``.
    """
    L = lax_nijhoff(u, x, P).entries
    dL = _dgamma_checked(u, x, P)
    if variant == "a":
        S = L @ dL
    elif variant == "b":
        S = np.linalg.solve(L, dL)
    elif variant == "c":
        S = dL @ np.linalg.inv(L)
    else:
        raise ValueError(f"unknown s12 variant {variant!r}")
    return RTensor(_kron_units(S, "s"), complex(u), "s12")


def dynamical_quadruple(u, v, x: PhasePoint, P: ModelParams, variant: str = "b"):
    """``(r_plus, r_minus, s_plus, s_minus)`` for the root-free Lax operator.

    ``r- = a12 - s12(u) + s21(v)``, ``r+ = a12 + u+ + u-``,
    ``s+ = s12(u) + u+``, ``s- = s21(v) - u-``.
    """
    uv = (complex(u), complex(v))
    a = a12(u, v, x, P).data
    up = u_plus(x, P).data
    um = u_minus(x, P).data
    su = s12(u, x, P, variant).data
    s21v = swap(s12(v, x, P, variant).data)
    return (
        RTensor(a + up + um, uv, "r_plus"),
        RTensor(a - su + s21v, uv, "r_minus"),
        RTensor(su + up, uv, "s_plus"),
        RTensor(s21v - um, uv, "s_minus"),
    )


# --- twisting ------------------------------------------------------------

def _obs_nijhoff(w, P):
    return Observable(lambda y: lax_nijhoff(w, y, P).entries, lambda y: lax_nijhoff_grad(w, y, P))


def _obs_gauge(w, P):
    return Observable(lambda y: gauge_g(w, y, P), lambda y: gauge_g_grad(w, y, P))


def twist_delta(u, v, x: PhasePoint, P: ModelParams, method: BracketMethod | None = None) -> RTensor:
    """``Delta_12 = 1/2 [{g1, g2} g1^-1 g2^-1, g2 L2 g2^-1] + g2 {g1, L2} g1^-1 g2^-1``.

    ``L`` is the root-free Lax operator and ``g`` the gauge matrix;
    brackets carry the factor :data:`ORIENTATION`.
    """
    m = method or BracketMethod("analytic")
    n = P.n
    I = np.eye(n)
    gu = gauge_g(u, x, P)
    gv = gauge_g(v, x, P)
    Lv = lax_nijhoff(v, x, P).entries
    g2 = np.kron(I, gv)
    g1i = np.kron(np.linalg.inv(gu), I)
    g2i = np.kron(I, np.linalg.inv(gv))
    L2 = np.kron(I, Lv)
    Bgg = ORIENTATION * bracket_matrix(_obs_gauge(u, P), _obs_gauge(v, P), x, m)
    BgL = ORIENTATION * bracket_matrix(_obs_gauge(u, P), _obs_nijhoff(v, P), x, m)
    X = Bgg @ g1i @ g2i
    Y = g2 @ L2 @ g2i
    D = 0.5 * (X @ Y - Y @ X) + g2 @ BgL @ g1i @ g2i
    return RTensor(D, (complex(u), complex(v)), "twisted")


def twisted_quadruple(u, v, x: PhasePoint, P: ModelParams, variant: str = "b",
                      method: BracketMethod | None = None):
    """Gauge-transformed quadruple ``(r~+, r~-, s~+, s~-)`` and ``h12``.

    ``Delta~_12 = L~_2^{-1} Delta_12`` and ``Delta~(1)_12 = Delta_12 L~_2^{-1}``
    with ``L~`` the factorized Lax operator. Returns a dict with the four
    tensors and the two assemblies of ``h12`` (from ``r-`` and ``r+``).
    """
    n = P.n
    I = np.eye(n)

    def pieces(a, b):
        D = twist_delta(a, b, x, P, method).data
        Lb_inv = np.kron(I, np.linalg.inv(lax_factorized(b, x, P).entries))
        G = np.kron(gauge_g(a, x, P), gauge_g(b, x, P))
        Gi = np.linalg.inv(G)
        return Lb_inv @ D, D @ Lb_inv, G, Gi

    Dt, D1, G, Gi = pieces(u, v)
    Dt_vu, D1_vu, _, _ = pieces(v, u)
    Dt21 = swap(Dt_vu)   # Delta~_21(v, u)
    D121 = swap(D1_vu)   # Delta~(1)_21(v, u)
    rp, rm, sp, sm = (t.data for t in dynamical_quadruple(u, v, x, P, variant))

    def conj(t):
        return G @ t @ Gi

    uv = (complex(u), complex(v))
    r_minus = conj(rm) - Dt + Dt21
    r_plus = conj(rp) - D1 + D121
    s_plus = conj(sp) - Dt21 - D1
    s_minus = conj(sm) - Dt - D121
    return {
        "r_plus": RTensor(r_plus, uv, "twisted"),
        "r_minus": RTensor(r_minus, uv, "twisted"),
        "s_plus": RTensor(s_plus, uv, "twisted"),
        "s_minus": RTensor(s_minus, uv, "twisted"),
        "h12_minus": RTensor(r_minus, uv, "twisted"),
        "h12_plus": RTensor(r_plus, uv, "twisted"),
    }

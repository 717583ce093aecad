"""Residual checks for the identities of the model, and the suite driver.

Every check builds its two sides along separate code paths (the bracket
engine on one side, tensor algebra on the other) and returns a
:class:`ResidualReport`. ``rel_residual`` is the Frobenius norm of the
difference divided by ``max(||LHS||, ||RHS||)``.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, fields

import numpy as np

from . import lax as lx
from . import rmat as rm
from .elliptic import sigma
from .errors import EllRSError
from .phase import (
    BracketMethod,
    Observable,
    PhasePoint,
    bracket_matrix,
    poisson_map,
    poisson_map_shift_grad,
    random_phase_point,
    symplectic_form,
    symplectic_residual,
)

__all__ = [
    "ResidualReport",
    "DEFAULT_TOLERANCES",
    "CHECK_NAMES",
    "digest",
    "random_spectral_pair",
    "check_prop3",
    "check_sklyanin",
    "check_cybe",
    "check_r_antisymmetry",
    "check_r_zn_symmetry",
    "check_qybe",
    "check_R_zn_symmetry",
    "check_R_identity",
    "check_classical_limit",
    "check_dynamical_quadratic",
    "select_s12_variant",
    "check_s12_discrimination",
    "check_skew3",
    "check_skew4",
    "check_symplectic",
    "check_lemma1",
    "check_TG_identity",
    "check_linear_cm",
    "check_cm_limit",
    "check_involution",
    "check_hamiltonian_involution",
    "check_vandermonde",
    "check_vandermonde_calibration",
    "check_twist_s",
    "check_h12_consistency",
    "check_h12_classical",
    "check_h12_constancy",
    "check_twist_bracket",
    "run_suite",
]

ANALYTIC = BracketMethod("analytic")
FD = BracketMethod("finite_difference")
REF_FLOOR = 1e-8

DEFAULT_TOLERANCES = {
    "classical_limit": 0.1,
    "cm_limit": 0.1,
    "cybe": 1e-10,
    "dynamical_quadratic": 1e-8,
    "dynamical_quadratic_fd": 1e-6,
    "h12_classical": 1e-6,
    "h12_consistency": 1e-6,
    "h12_constancy": 1e-10,
    "hamiltonian_involution": 1e-7,
    "involution": 1e-7,
    "lemma1": 1e-9,
    "linear_cm": 1e-8,
    "prop3": 1e-9,
    "qybe": 1e-10,
    "R_identity": 1e-14,
    "R_zn_symmetry": 1e-12,
    "r_antisymmetry": 1e-12,
    "r_zn_symmetry": 1e-12,
    "s12_discrimination": 1e-3,
    "skew3": 1e-10,
    "skew4": 1e-10,
    "sklyanin": 1e-9,
    "sklyanin_fd": 1e-6,
    "symplectic": 1e-9,
    "tg_identity": 1e-9,
    "twist_bracket": 1e-6,
    "twist_s": 1e-6,
    "vandermonde": 1e-10,
    "vandermonde_calibration": 1e-10,
}
CHECK_NAMES = tuple(sorted(DEFAULT_TOLERANCES))


@dataclass
class ResidualReport:
    """Outcome of one residual check."""

    check_name: str
    abs_residual: float
    rel_residual: float
    tolerance: float
    inputs_digest: str
    passed: bool
    notes: str = ""

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def digest(*items) -> str:
    """Short stable hash of the inputs of a check."""
    def norm(o):
        if isinstance(o, PhasePoint):
            return {"q": norm(o.q), "p": norm(o.p)}
        if isinstance(o, lx.ModelParams):
            return [o.n, norm(o.tau), norm(o.gamma), o.hbar, o.mc2]
        if isinstance(o, np.ndarray):
            return [norm(v) for v in o.tolist()]
        if isinstance(o, (list, tuple)):
            return [norm(v) for v in o]
        if isinstance(o, (complex, np.complexfloating)):
            return [repr(float(o.real)), repr(float(o.imag))]
        if isinstance(o, (float, np.floating)):
            return repr(float(o))
        return o

    text = json.dumps(norm(list(items)), sort_keys=True)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def _make(name, abs_res, ref, tol, inputs, notes=""):
    abs_res = float(abs_res)
    ref = float(ref)
    if ref >= REF_FLOOR:
        rel = abs_res / ref
    else:
        rel = abs_res
    passed = rel < tol
    if not math.isfinite(rel):
        passed = False
    return ResidualReport(name, abs_res, rel, float(tol), digest(*inputs), bool(passed), notes)


def _report(name, lhs, rhs, tol, inputs, notes=""):
    lhs = np.asarray(lhs)
    rhs = np.asarray(rhs)
    ref = max(np.linalg.norm(lhs), np.linalg.norm(rhs))
    return _make(name, np.linalg.norm(lhs - rhs), ref, tol, inputs, notes)


def _tol(name, tol):
    return DEFAULT_TOLERANCES[name] if tol is None else tol


def _grid_distance(z, P: lx.ModelParams) -> float:
    """Distance from ``z`` to the set ``k/n + m tau``, which contains the zeros of sigma and of every theta^(j)."""
    tau = P.tau
    best = np.inf
    m0 = math.floor(z.imag / tau.imag)
    for m in range(m0 - 1, m0 + 3):
        w = z - m * tau
        k0 = math.floor(w.real * P.n)
        for k in range(k0 - 1, k0 + 3):
            best = min(best, abs(w - k / P.n))
    return best


def random_spectral_pair(rng: np.random.Generator, P: lx.ModelParams, min_dist: float = 0.05):
    """Draw ``(u, v)`` with ``u``, ``v``, ``u - v`` and their ``n gamma`` and ``i hbar`` shifts off the pole grid."""
    for _ in range(10000):
        u, v = rng.uniform(0, 1, 2) + 1j * rng.uniform(-0.3, 0.3, 2) * P.tau.imag
        u, v = complex(u), complex(v)
        pts = [u, v, u - v, u + P.n * P.gamma, v + P.n * P.gamma, u - v + 1j * P.hbar, v - u + 1j * P.hbar]
        if min(_grid_distance(z, P) for z in pts) >= min_dist:
            return u, v
    raise RuntimeError("could not draw spectral parameters away from poles")


def _L1L2(Lu, Lv):
    n = Lu.shape[0]
    I = np.eye(n)
    return np.kron(Lu, I), np.kron(I, Lv)


def _comm(a, b):
    return a @ b - b @ a


def _lax_obs(kind, w, P, s=None):
    if kind == "factorized":
        return Observable(lambda y: lx.lax_factorized(w, y, P).entries, lambda y: lx.lax_factorized_grad(w, y, P))
    if kind == "nijhoff":
        return Observable(lambda y: lx.lax_nijhoff(w, y, P).entries, lambda y: lx.lax_nijhoff_grad(w, y, P))
    if kind == "cm":
        return Observable(lambda y: lx.lax_cm(w, y, s, P).entries, lambda y: lx.lax_cm_grad(w, y, s, P))
    raise ValueError(kind)


# --- Lax operators -----------------------------------------------------------

def check_prop3(u, x: PhasePoint, P: lx.ModelParams, tol=None) -> ResidualReport:
    """``g L_nijhoff g^{-1}`` against the factorized operator."""
    g = lx.gauge_g(u, x, P)
    lhs = g @ lx.lax_nijhoff(u, x, P).entries @ np.linalg.inv(g)
    rhs = lx.lax_factorized(u, x, P).entries
    return _report("prop3", lhs, rhs, _tol("prop3", tol), (u, x, P))


def check_sklyanin(u, v, x: PhasePoint, P: lx.ModelParams, method: BracketMethod = ANALYTIC,
                   tol=None) -> ResidualReport:
    """``{L_1(u), L_2(v)} = [r_12(u - v), L_1(u) L_2(v)]`` for the factorized operator."""
    name = "sklyanin" if method.mode != "finite_difference" else "sklyanin_fd"
    lhs = rm.ORIENTATION * bracket_matrix(_lax_obs("factorized", u, P), _lax_obs("factorized", v, P), x, method)
    L1, L2 = _L1L2(lx.lax_factorized(u, x, P).entries, lx.lax_factorized(v, x, P).entries)
    rhs = _comm(rm.classical_r(u - v, P).data, L1 @ L2)
    return _report(name, lhs, rhs, _tol(name, tol), (u, v, x, P), f"mode={method.mode}")


def check_involution(u, v, l: int, m: int, x: PhasePoint, P: lx.ModelParams, tol=None) -> ResidualReport:
    """``{tr L(u)^l, tr L(v)^m}`` split into its two canonical halves."""
    aq, ap = lx.trace_power_grad(u, l, x, P)
    bq, bp = lx.trace_power_grad(v, m, x, P)
    lhs = np.sum(aq * bp)
    rhs = np.sum(ap * bq)
    return _report("involution", lhs, rhs, _tol("involution", tol), (u, v, l, m, x, P), f"l={l} m={m}")


def check_hamiltonian_involution(u, l: int, x: PhasePoint, P: lx.ModelParams, tol=None) -> ResidualReport:
    """``{H, tr L(u)^l}`` with ``x`` in the variables of the Hamiltonian.

    The trace is evaluated at the image of ``x`` under the inverse Poisson
    map and differentiated by the chain rule.
    """
    y = poisson_map(x, -P.gamma, P.tau, P.ctl)
    fq, fp = lx.trace_power_grad(u, l, y, P)
    J = poisson_map_shift_grad(x.q, P.gamma, P.tau, P.ctl)
    tq = fq - J.T @ fp
    hq, hp = lx.hamiltonian_grad(x, P)
    lhs = np.sum(hq * fp)
    rhs = np.sum(hp * tq)
    return _report("hamiltonian_involution", lhs, rhs, _tol("hamiltonian_involution", tol), (u, l, x, P), f"l={l}")


def check_vandermonde(u_list, P: lx.ModelParams, const=None, tol=None) -> ResidualReport:
    """Determinant of ``theta^{(j)}(u_k)`` against the product formula."""
    u = np.asarray(u_list, dtype=complex)
    if const is None:
        const = lx.vandermonde_constant(u.shape[0], P)
    lhs = lx.vandermonde_lhs(u, P)
    rhs = const * lx.vandermonde_rhs(u, P)
    return _report("vandermonde", lhs, rhs, _tol("vandermonde", tol), (u, P))


def check_vandermonde_calibration(n: int, P: lx.ModelParams, other_base, tol=None) -> ResidualReport:
    """Constant from the default calibration tuple against one from ``other_base``."""
    c1 = lx.vandermonde_constant(n, P)
    c2 = lx.vandermonde_constant(n, P, base=np.asarray(other_base, dtype=complex))
    return _report("vandermonde_calibration", c1, c2, _tol("vandermonde_calibration", tol), (n, other_base, P))


def check_symplectic(x: PhasePoint, P: lx.ModelParams, tol=None) -> ResidualReport:
    """``||J^T Omega J - Omega||`` for the momentum-shift map."""
    res = symplectic_residual(lambda y: poisson_map(y, P.gamma, P.tau, P.ctl), x)
    return _make("symplectic", res, np.linalg.norm(symplectic_form(x.n)), _tol("symplectic", tol), (x, P))


def check_linear_cm(u, v, x_prime: PhasePoint, s: float, P: lx.ModelParams,
                    method: BracketMethod = ANALYTIC, tol=None) -> ResidualReport:
    """``{L_CM,1(u), L_CM,2(v)} = [r_12(u - v), L_CM,1(u) + L_CM,2(v)]``."""
    lhs = rm.ORIENTATION * bracket_matrix(_lax_obs("cm", u, P, s), _lax_obs("cm", v, P, s), x_prime, method)
    L1, L2 = _L1L2(lx.lax_cm(u, x_prime, s, P).entries, lx.lax_cm(v, x_prime, s, P).entries)
    rhs = _comm(rm.classical_r(u - v, P).data, L1 + L2)
    return _report("linear_cm", lhs, rhs, _tol("linear_cm", tol), (u, v, x_prime, s, P), f"s={s}")


def check_cm_limit(u, x_prime: PhasePoint, s: float, P: lx.ModelParams,
                   betas=(1e-2, 1e-3, 1e-4), tol=None) -> ResidualReport:
    """Log-log slope of ``||L_CM - (-(L' - 1)/beta)||`` against ``beta`` (expected 1)."""
    L = lx.lax_cm(u, x_prime, s, P).entries
    errs = np.array([np.linalg.norm(L - lx.lax_cm_limit(u, x_prime, s, b, P)) for b in betas])
    slope = float(np.polyfit(np.log(betas), np.log(errs), 1)[0])
    return _make("cm_limit", abs(slope - 1.0), 1.0, _tol("cm_limit", tol), (u, x_prime, s, betas, P),
                 f"slope={slope:.6f}")


# --- r-matrices ----------------------------------------------------------------

def check_cybe(v1, v2, v3, P: lx.ModelParams, tol=None) -> ResidualReport:
    """``[r12, r13] + [r12, r23] = -[r13, r23]``."""
    r12 = rm.embed(rm.classical_r(v1 - v2, P).data, "12")
    r13 = rm.embed(rm.classical_r(v1 - v3, P).data, "13")
    r23 = rm.embed(rm.classical_r(v2 - v3, P).data, "23")
    lhs = _comm(r12, r13) + _comm(r12, r23)
    rhs = -_comm(r13, r23)
    return _report("cybe", lhs, rhs, _tol("cybe", tol), (v1, v2, v3, P))


def check_r_antisymmetry(v, P: lx.ModelParams, tol=None) -> ResidualReport:
    """``r_12(v) = -P r_12(-v) P``."""
    lhs = rm.classical_r(v, P).data
    rhs = -rm.swap(rm.classical_r(-v, P).data)
    return _report("r_antisymmetry", lhs, rhs, _tol("r_antisymmetry", tol), (v, P))


def _zn(name, t, P, tol, inputs):
    cs = rm.clock_shift(P.n)
    lhs, rhs = [], []
    for a in (cs.g, cs.h):
        aa = np.kron(a, a)
        lhs.append(aa @ t @ np.linalg.inv(aa))
        rhs.append(t)
    return _report(name, np.array(lhs), np.array(rhs), _tol(name, tol), inputs)


def check_r_zn_symmetry(v, P: lx.ModelParams, tol=None) -> ResidualReport:
    """``(a x a) r (a x a)^{-1} = r`` for the clock and shift matrices."""
    return _zn("r_zn_symmetry", rm.classical_r(v, P).data, P, tol, (v, P))


def check_R_zn_symmetry(v, P: lx.ModelParams, tol=None) -> ResidualReport:
    """Z_n x Z_n symmetry of the quantum R-matrix."""
    return _zn("R_zn_symmetry", rm.quantum_R(v, P).data, P, tol, (v, P))


def check_qybe(v1, v2, v3, P: lx.ModelParams, tol=None) -> ResidualReport:
    """``R12 R13 R23 = R23 R13 R12``."""
    R12 = rm.embed(rm.quantum_R(v1 - v2, P).data, "12")
    R13 = rm.embed(rm.quantum_R(v1 - v3, P).data, "13")
    R23 = rm.embed(rm.quantum_R(v2 - v3, P).data, "23")
    return _report("qybe", R12 @ R13 @ R23, R23 @ R13 @ R12, _tol("qybe", tol), (v1, v2, v3, P))


def check_R_identity(v, P: lx.ModelParams, tol=None) -> ResidualReport:
    """``R(v)`` at ``hbar = 0`` is the identity."""
    R = rm.quantum_R(v, P, hbar=0.0).data
    return _report("R_identity", R, np.eye(P.n ** 2), _tol("R_identity", tol), (v, P))


def check_classical_limit(v, P: lx.ModelParams, hbar_list=None, tol=None) -> ResidualReport:
    """Slope of ``log||R - 1 - i hbar r||`` against ``log hbar`` (expected 2)."""
    h = np.logspace(-4, -1, 7) if hbar_list is None else np.asarray(hbar_list)
    slope = rm.classical_limit_residual(v, h, P)
    return _make("classical_limit", abs(slope - 2.0), 1.0, _tol("classical_limit", tol),
                 (v, h, P), f"slope={slope:.6f}")


# --- dynamical quadruple ---------------------------------------------------------

def _quadratic_rhs(u, v, x, P, variant):
    L1, L2 = _L1L2(lx.lax_nijhoff(u, x, P).entries, lx.lax_nijhoff(v, x, P).entries)
    rp, rmi, sp, sm = (t.data for t in rm.dynamical_quadruple(u, v, x, P, variant))
    rp_vu = rm.dynamical_quadruple(v, u, x, P, variant)[0].data
    rp21 = rm.swap(rp_vu)
    LL = L1 @ L2
    return LL @ rmi - rp21 @ LL + L1 @ sp @ L2 - L2 @ sm @ L1


def _quadratic_lhs(u, v, x, P, method):
    return rm.ORIENTATION * bracket_matrix(_lax_obs("nijhoff", u, P), _lax_obs("nijhoff", v, P), x, method)


def check_dynamical_quadratic(u, v, x: PhasePoint, P: lx.ModelParams, s12_variant: str = "auto",
                              method: BracketMethod = ANALYTIC, tol=None) -> ResidualReport:
    """Quadratic bracket of the root-free operator against the dynamical quadruple.

    With ``s12_variant="auto"`` the reading of ``s12`` giving the smallest
    residual is used and recorded in ``notes``.
    """
    name = "dynamical_quadratic" if method.mode != "finite_difference" else "dynamical_quadratic_fd"
    lhs = _quadratic_lhs(u, v, x, P, method)
    variants = rm.S12_VARIANTS if s12_variant == "auto" else (s12_variant,)
    best = None
    for var in variants:
        rep = _report(name, lhs, _quadratic_rhs(u, v, x, P, var), _tol(name, tol), (u, v, x, P, var),
                      f"s12_variant={var}")
        if best is None or rep.rel_residual < best.rel_residual:
            best = rep
    if not best.passed:
        best.notes += "; no s12 reading closes the bracket"
    return best


def select_s12_variant(u, v, x: PhasePoint, P: lx.ModelParams, method: BracketMethod = ANALYTIC):
    """Relative residual of every ``s12`` reading, best first."""
    lhs = _quadratic_lhs(u, v, x, P, method)
    res = {}
    for var in rm.S12_VARIANTS:
        rhs = _quadratic_rhs(u, v, x, P, var)
        res[var] = float(np.linalg.norm(lhs - rhs) / max(np.linalg.norm(lhs), np.linalg.norm(rhs)))
    return sorted(res.items(), key=lambda kv: kv[1])


def check_s12_discrimination(u, v, x: PhasePoint, P: lx.ModelParams, method: BracketMethod = ANALYTIC,
                             tol=None) -> ResidualReport:
    """Ratio best / runner-up residual; passes when the runner-up is worse by ``1/tol``."""
    ranked = select_s12_variant(u, v, x, P, method)
    rb, rs = ranked[0][1], ranked[1][1]
    ratio = rb / rs if rs > 0 else math.inf
    notes = ", ".join(f"{k}={r:.3e}" for k, r in ranked)
    return _make("s12_discrimination", ratio, 1.0, _tol("s12_discrimination", tol), (u, v, x, P), notes)


def check_skew3(u, v, x: PhasePoint, P: lx.ModelParams, variant: str = "b", tol=None) -> ResidualReport:
    """``r+-_21(v,u) = -r+-_12(u,v)`` and ``s+_21(v,u) = s-_12(u,v)``."""
    rp, rmi, sp, sm = (t.data for t in rm.dynamical_quadruple(u, v, x, P, variant))
    rp2, rm2, sp2, _ = (t.data for t in rm.dynamical_quadruple(v, u, x, P, variant))
    lhs = np.array([rm.swap(rp2), rm.swap(rm2), rm.swap(sp2)])
    rhs = np.array([-rp, -rmi, sm])
    return _report("skew3", lhs, rhs, _tol("skew3", tol), (u, v, x, P, variant))


def check_skew4(u, v, x: PhasePoint, P: lx.ModelParams, variant: str = "b", tol=None) -> ResidualReport:
    """``r+ - s+ = r- - s-``."""
    rp, rmi, sp, sm = (t.data for t in rm.dynamical_quadruple(u, v, x, P, variant))
    return _report("skew4", rp - sp, rmi - sm, _tol("skew4", tol), (u, v, x, P, variant))


# --- appendix identities ----------------------------------------------------------

def _X(w, q, j, P):
    n = P.n
    Ap = lx.intertwiner_A(w + n * P.gamma, q, P)
    Ai = np.linalg.inv(lx.intertwiner_A(w, q, P))
    return np.outer(Ap[:, j], Ai[j, :])


def _X_all_dq(w, q, P):
    """``X[j]`` and ``dX[i, j] = d X_j / d q_i`` with ``X_j = A(w + n gamma)[:, j] A(w)^{-1}[j, :]``."""
    n = P.n
    Ap = lx.intertwiner_A(w + n * P.gamma, q, P)
    Ai = np.linalg.inv(lx.intertwiner_A(w, q, P))
    dAp = lx.intertwiner_dq(w + n * P.gamma, q, P)
    dA = lx.intertwiner_dq(w, q, P)
    X = np.einsum("aj,jb->jab", Ap, Ai)
    dX = np.empty((n, n, n, n), dtype=complex)
    for i in range(n):
        dAi = -Ai @ dA[i] @ Ai
        dX[i] = np.einsum("aj,jb->jab", dAp[i], Ai) + np.einsum("aj,jb->jab", Ap, dAi)
    return X, dX


def check_lemma1(u, v, x: PhasePoint, P: lx.ModelParams, tol=None) -> ResidualReport:
    """``[r_12(u - v), L_1(u) L_2(v)]`` against the double sum of ``A A^{-1} e^p dq(A A^{-1})`` terms.

    The double sum is divided by ``sigma(gamma)^2``, the normalization carried by ``L_1 L_2``.
    """
    n = P.n
    q = np.asarray(x.q)
    e = np.exp(np.asarray(x.p))
    L1, L2 = _L1L2(lx.lax_factorized(u, x, P).entries, lx.lax_factorized(v, x, P).entries)
    lhs = _comm(rm.classical_r(u - v, P).data, L1 @ L2)
    Xu, dXu = _X_all_dq(u, q, P)
    Xv, dXv = _X_all_dq(v, q, P)
    rhs = np.zeros((n * n, n * n), dtype=complex)
    for i in range(n):
        for j in range(n):
            w = e[i] * e[j]
            rhs += w * (np.kron(Xu[i], dXv[i, j]) - np.kron(dXu[i, j], Xv[i]))
    rhs /= sigma(P.gamma, P.tau, P.ctl) ** 2
    return _report("lemma1", lhs, rhs, _tol("lemma1", tol), (u, v, x, P))


def check_TG_identity(u, v, x: PhasePoint, hbar: float, P: lx.ModelParams, tol=None) -> ResidualReport:
    """``T(i, j) = G(i, j)`` for all ``i <= j``; the shift ``D_i`` sends ``q_i -> q_i - i hbar``.

    The reported residuals are the worst over ``(i, j)``.
    """
    n = P.n
    q = np.asarray(x.q, dtype=complex)
    R = rm.quantum_R(u - v, P, hbar=hbar).data

    def sh(i):
        qq = q.copy()
        qq[i] -= 1j * hbar
        return qq

    worst_abs, worst_rel, ref_at = 0.0, 0.0, 1.0
    for i in range(n):
        for j in range(i, n):
            if i == j:
                T = R @ np.kron(_X(u, q, i, P), _X(v, sh(i), i, P))
                G = np.kron(_X(u, sh(i), i, P), _X(v, q, i, P)) @ R
            else:
                T = R @ (np.kron(_X(u, q, i, P), _X(v, sh(i), j, P)) + np.kron(_X(u, q, j, P), _X(v, sh(j), i, P)))
                G = (np.kron(_X(u, sh(i), j, P), _X(v, q, i, P)) + np.kron(_X(u, sh(j), i, P), _X(v, q, j, P))) @ R
            a = np.linalg.norm(T - G)
            ref = max(np.linalg.norm(T), np.linalg.norm(G))
            if a / ref >= worst_rel:
                worst_abs, worst_rel, ref_at = a, a / ref, ref
    return _make("tg_identity", worst_abs, ref_at, _tol("tg_identity", tol), (u, v, x, hbar, P), f"hbar={hbar}")


# --- twisting ------------------------------------------------------------------

def check_twist_s(u, v, x: PhasePoint, P: lx.ModelParams, which: str = "s_plus", variant: str = "b",
                  tol=None):
    """Vanishing of ``s~+`` (or ``s~-``): conjugated ``s`` against its Delta corrections."""
    t = rm.twisted_quadruple(u, v, x, P, variant)
    G = np.kron(lx.gauge_g(u, x, P), lx.gauge_g(v, x, P))
    sp, sm = (d.data for d in rm.dynamical_quadruple(u, v, x, P, variant)[2:])
    base = G @ (sp if which == "s_plus" else sm) @ np.linalg.inv(G)
    corr = base - t[which].data
    return _report("twist_s", base, corr, _tol("twist_s", tol), (u, v, x, P, which, variant), which)


def check_h12_consistency(u, v, x: PhasePoint, P: lx.ModelParams, variant: str = "b", tol=None):
    """The two assemblies of ``h12`` (from ``r-`` and from ``r+``) agree."""
    t = rm.twisted_quadruple(u, v, x, P, variant)
    return _report("h12_consistency", t["h12_minus"].data, t["h12_plus"].data, _tol("h12_consistency", tol),
                   (u, v, x, P, variant))


def check_h12_classical(u, v, x: PhasePoint, P: lx.ModelParams, variant: str = "b", tol=None):
    """``h12`` against the classical r-matrix ``r(u - v)``."""
    t = rm.twisted_quadruple(u, v, x, P, variant)
    return _report("h12_classical", t["h12_minus"].data, rm.classical_r(u - v, P).data,
                   _tol("h12_classical", tol), (u, v, x, P, variant))


def check_h12_constancy(u, v, points, P: lx.ModelParams, variant: str = "b", tol=None):
    """Spread of ``h12`` over several phase points, relative to its mean."""
    hs = np.array([rm.twisted_quadruple(u, v, y, P, variant)["h12_minus"].data for y in points])
    mean = hs.mean(axis=0)
    spread = np.sqrt(np.mean([np.linalg.norm(h - mean) ** 2 for h in hs]))
    return _make("h12_constancy", spread, np.linalg.norm(mean), _tol("h12_constancy", tol),
                 (u, v, list(points), P, variant))


def check_twist_bracket(u, v, x: PhasePoint, P: lx.ModelParams, variant: str = "b", tol=None):
    """Bracket of the factorized operator against the quadratic form built from the twisted tensors."""
    t = rm.twisted_quadruple(u, v, x, P, variant)
    t_vu = rm.twisted_quadruple(v, u, x, P, variant)
    L1, L2 = _L1L2(lx.lax_factorized(u, x, P).entries, lx.lax_factorized(v, x, P).entries)
    LL = L1 @ L2
    rp21 = rm.swap(t_vu["r_plus"].data)
    rhs = LL @ t["r_minus"].data - rp21 @ LL + L1 @ t["s_plus"].data @ L2 - L2 @ t["s_minus"].data @ L1
    lhs = rm.ORIENTATION * bracket_matrix(_lax_obs("factorized", u, P), _lax_obs("factorized", v, P), x)
    return _report("twist_bracket", lhs, rhs, _tol("twist_bracket", tol), (u, v, x, P, variant))


# --- suite -------------------------------------------------------------------------

def _failed(name, exc, inputs, tol):
    return ResidualReport(name, math.inf, math.inf, tol, digest(*inputs), False,
                          f"{type(exc).__name__}: {exc}")


def _suite_cases(n, seed, cfg):
    """Yield ``(name, thunk)`` pairs for one ``(n, seed)`` cell of the suite."""
    P = lx.ModelParams(n=n, tau=cfg.tau, gamma=cfg.gamma, hbar=cfg.hbar, mc2=cfg.mc2, ctl=cfg.series)
    rng = np.random.default_rng([seed, n])
    x = random_phase_point(rng, n)
    if cfg.spectral_points:
        u, v = cfg.spectral_points[seed % len(cfg.spectral_points)]
    else:
        u, v = random_spectral_pair(rng, P)
    w, _ = random_spectral_pair(rng, P)
    v1, v2, v3 = u, v, w
    s = cfg.cm_coupling
    variant = "b" if cfg.s12_variant == "auto" else cfg.s12_variant
    extra = [random_phase_point(rng, n) for _ in range(3)]
    tuples = 0.1 * np.arange(1, n + 1) + rng.uniform(0, 0.5, n) + 1j * rng.uniform(-0.2, 0.2, n)
    other_base = 0.13 * np.arange(1, n + 1) + 0.02 + 0.05j
    qtol = 1e-10 if n <= 3 else 1e-9

    cases = {
        "prop3": lambda: check_prop3(u, x, P),
        "sklyanin": lambda: check_sklyanin(u, v, x, P, ANALYTIC),
        "sklyanin_fd": lambda: check_sklyanin(u, v, x, P, FD),
        "cybe": lambda: check_cybe(v1, v2, v3, P),
        "r_antisymmetry": lambda: check_r_antisymmetry(u - v, P),
        "r_zn_symmetry": lambda: check_r_zn_symmetry(u - v, P),
        "qybe": lambda: check_qybe(v1, v2, v3, P, tol=qtol),
        "R_zn_symmetry": lambda: check_R_zn_symmetry(u - v, P),
        "R_identity": lambda: check_R_identity(u - v, P),
        "classical_limit": lambda: check_classical_limit(u - v, P),
        "dynamical_quadratic": lambda: check_dynamical_quadratic(u, v, x, P, cfg.s12_variant, ANALYTIC),
        "dynamical_quadratic_fd": lambda: check_dynamical_quadratic(u, v, x, P, cfg.s12_variant, FD),
        "s12_discrimination": lambda: check_s12_discrimination(u, v, x, P),
        "skew3": lambda: check_skew3(u, v, x, P, variant),
        "skew4": lambda: check_skew4(u, v, x, P, variant),
        "symplectic": lambda: check_symplectic(x, P),
        "lemma1": lambda: check_lemma1(u, v, x, P),
        "tg_identity": lambda: check_TG_identity(u, v, x, P.hbar, P),
        "linear_cm": lambda: check_linear_cm(u, v, x, s, P),
        "cm_limit": lambda: check_cm_limit(u, x, s, P),
        "involution": lambda: [check_involution(u, v, l, m, x, P) for l in (1, 2, 3) for m in (1, 2, 3)],
        "hamiltonian_involution": lambda: [check_hamiltonian_involution(u, l, x, P) for l in (1, 2, 3)],
        "vandermonde": lambda: check_vandermonde(tuples, P),
        "vandermonde_calibration": lambda: check_vandermonde_calibration(n, P, other_base),
        "twist_s": lambda: [check_twist_s(u, v, x, P, k, variant) for k in ("s_plus", "s_minus")],
        "h12_consistency": lambda: check_h12_consistency(u, v, x, P, variant),
        "h12_classical": lambda: check_h12_classical(u, v, x, P, variant),
        "h12_constancy": lambda: check_h12_constancy(u, v, [x] + extra, P, variant),
        "twist_bracket": lambda: check_twist_bracket(u, v, x, P, variant),
    }
    return cases, (u, v, x, P)


def run_suite(config) -> list:
    """Run every enabled check over ``config.n_values`` x ``config.seeds``.

    Errors inside a check become failed reports. Reports are ordered by
    check name, then seed, then ``n``; tolerances from ``config.tolerances``
    override the defaults.
    """
    out = []
    for n in config.n_values:
        for seed in config.seeds:
            cases, inputs = _suite_cases(n, seed, config)
            for name in config.checks:
                try:
                    res = cases[name]()
                except EllRSError as exc:
                    res = _failed(name, exc, inputs, DEFAULT_TOLERANCES[name])
                for rep in (res if isinstance(res, list) else [res]):
                    if name in config.tolerances:
                        _retol(rep, config.tolerances[name])
                    rep.notes = (f"n={n} seed={seed}" + (f"; {rep.notes}" if rep.notes else ""))
                    out.append((name, seed, n, rep))
    out.sort(key=lambda t: (t[0], t[1], t[2]))
    return [t[3] for t in out]


def _retol(rep: ResidualReport, tol: float):
    rep.tolerance = float(tol)
    rep.passed = bool(math.isfinite(rep.rel_residual) and rep.rel_residual < tol)

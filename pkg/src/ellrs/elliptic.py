"""Theta functions with characteristics and the elliptic functions built on them.

All functions accept a scalar or an array for the argument and return the
same shape. The modulus may be given as a complex number or as a
:class:`ModularParam`.

The series

.. math:: \\theta[a;b](z,\\tau) = \\sum_m \\exp\\{i\\pi[(m+a)^2\\tau + 2(m+a)(z+b)]\\}

is summed over the symmetric window ``|m + a| <= M``. Before summation the
argument is shifted by the nearest multiple of ``tau`` so that
``|Im z| <= Im(tau)/2``; the exact quasi-periodicity factor is applied
afterwards.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InvalidModulus, NonConvergent, PoleAtLatticePoint

__all__ = [
    "ThetaChar",
    "ModularParam",
    "SeriesControl",
    "DEFAULT_CONTROL",
    "POLE_FLOOR",
    "as_modulus",
    "theta_char",
    "theta_char_bound",
    "d_theta_char",
    "d2_theta_char",
    "sigma",
    "d_sigma",
    "d2_sigma",
    "theta_j",
    "d_theta_j",
    "d2_theta_j",
    "xi",
    "d_xi",
]

POLE_FLOOR = 1e-10


@dataclass(frozen=True)
class ThetaChar:
    """Characteristic ``(a, b)`` of a theta function."""

    a: float
    b: float


@dataclass(frozen=True)
class ModularParam:
    """Modular parameter ``tau`` with positive imaginary part."""

    tau: complex

    def __post_init__(self):
        tau = complex(self.tau)
        if not tau.imag > 0:
            raise InvalidModulus(f"Im(tau) must be positive, got tau={tau}")
        object.__setattr__(self, "tau", tau)


@dataclass(frozen=True)
class SeriesControl:
    """Truncation policy for the theta series.

    Parameters
    ----------
    max_terms : int
        Largest admissible half-width ``M`` of the summation window.
    tail_tol : float
        Required bound on the neglected tail, measured against terms of
        unit size (the largest term of the reduced series is of order one).
    """

    max_terms: int = 40
    tail_tol: float = 1e-16

    def __post_init__(self):
        if int(self.max_terms) < 1:
            raise ValueError("max_terms must be a positive integer")
        if not self.tail_tol > 0:
            raise ValueError("tail_tol must be positive")


DEFAULT_CONTROL = SeriesControl()


def as_modulus(tau) -> ModularParam:
    """Coerce a complex number (or a :class:`ModularParam`) to a modulus."""
    if isinstance(tau, ModularParam):
        return tau
    return ModularParam(complex(tau))


@lru_cache(maxsize=256)
def _window(im_tau: float, order: int, max_terms: int, tail_tol: float):
    """Smallest half-width meeting the tail tolerance, and its tail bound.

    After reduction ``|Im z| <= Im(tau)/2``, so a term with index ``k``
    is bounded by ``exp(-pi Im(tau) (k^2 - |k|))`` times ``|2 pi k|^order``.
    """
    def tail(M):
        j = np.arange(M, M + 80, dtype=float)
        major = (2 * math.pi * (j + 1)) ** order * np.exp(-math.pi * im_tau * (j * j - j))
        return 2.0 * float(major.sum())

    for M in range(2, max_terms + 1):
        t = tail(M)
        if t <= tail_tol:
            return M, t
    raise NonConvergent(
        f"theta series needs more than max_terms={max_terms} terms for "
        f"Im(tau)={im_tau:g} at tail_tol={tail_tol:g}"
    )


def _series(a: float, b: float, z, tau: complex, order: int, ctl: SeriesControl):
    """Return (value, tail bound) of the ``order``-th z-derivative."""
    z = np.asarray(z, dtype=complex)
    t = tau.imag
    M, tail = _window(t, order, int(ctl.max_terms), float(ctl.tail_tol))

    shift = np.rint(z.imag / t)
    z0 = z - shift * tau

    lo = math.ceil(-a - M)
    hi = math.floor(-a + M)
    k = np.arange(lo, hi + 1, dtype=float) + a
    zf = z0.reshape(-1, 1)
    terms = np.exp(1j * math.pi * (k * k * tau + 2 * k * (zf + b)))

    tw = 2j * math.pi * k
    base = [terms.sum(axis=1)]
    if order >= 1:
        base.append((terms * tw).sum(axis=1))
    if order >= 2:
        base.append((terms * tw * tw).sum(axis=1))

    s = shift.reshape(-1)
    phase = np.exp(-1j * math.pi * (s * s * tau + 2 * s * (z0.reshape(-1) + b)))
    c = -2j * math.pi * s
    if order == 0:
        val = base[0]
    elif order == 1:
        val = base[1] + c * base[0]
    else:
        val = base[2] + 2 * c * base[1] + c * c * base[0]
    val = (phase * val).reshape(z.shape)
    bound = (np.abs(phase) * tail).reshape(z.shape)
    if val.ndim == 0:
        return complex(val), float(bound)
    return val, bound


def _prep(tau, ctl):
    return as_modulus(tau).tau, (ctl or DEFAULT_CONTROL)


def theta_char_bound(ch: ThetaChar, z, tau, ctl: SeriesControl | None = None, deriv: int = 0):
    """Theta value (or z-derivative of order ``deriv``) with its tail bound.

    Returns
    -------
    value, bound : complex or ndarray
        The truncated sum and an a-posteriori bound on the neglected tail.
    """
    if deriv not in (0, 1, 2):
        raise ValueError("deriv must be 0, 1 or 2")
    tau_c, ctl = _prep(tau, ctl)
    return _series(float(ch.a), float(ch.b), z, tau_c, deriv, ctl)


def theta_char(ch: ThetaChar, z, tau, ctl: SeriesControl | None = None):
    """Theta function with characteristics ``theta[a;b](z, tau)``.

    Examples
    --------
    >>> abs(theta_char(ThetaChar(0.5, 0.5), 0.0, 1j)) < 1e-15
    True
    """
    return theta_char_bound(ch, z, tau, ctl, 0)[0]


def d_theta_char(ch: ThetaChar, z, tau, ctl: SeriesControl | None = None):
    """First z-derivative of :func:`theta_char`."""
    return theta_char_bound(ch, z, tau, ctl, 1)[0]


def d2_theta_char(ch: ThetaChar, z, tau, ctl: SeriesControl | None = None):
    """Second z-derivative of :func:`theta_char`."""
    return theta_char_bound(ch, z, tau, ctl, 2)[0]


_HALF = ThetaChar(0.5, 0.5)


def sigma(u, tau, ctl: SeriesControl | None = None):
    """Odd theta function ``sigma(u) = theta[1/2; 1/2](u, tau)``.

    Note this is not the Weierstrass sigma function: its derivative at the
    origin is not one (it is negative for ``tau = i``).
    """
    tau_c, ctl = _prep(tau, ctl)
    return _series(0.5, 0.5, u, tau_c, 0, ctl)[0]


def d_sigma(u, tau, ctl: SeriesControl | None = None):
    """Derivative of :func:`sigma`."""
    tau_c, ctl = _prep(tau, ctl)
    return _series(0.5, 0.5, u, tau_c, 1, ctl)[0]


def d2_sigma(u, tau, ctl: SeriesControl | None = None):
    """Second derivative of :func:`sigma`."""
    tau_c, ctl = _prep(tau, ctl)
    return _series(0.5, 0.5, u, tau_c, 2, ctl)[0]


def _char_j(j: int, n: int) -> float:
    return 0.5 - (int(j) % n) / n


def theta_j(j: int, u, n: int, tau, ctl: SeriesControl | None = None):
    """``theta^{(j)}(u) = theta[1/2 - j/n; 1/2](u, n tau)``, with ``j`` taken mod ``n``."""
    if n < 1:
        raise ValueError("n must be positive")
    tau_c, ctl = _prep(tau, ctl)
    return _series(_char_j(j, n), 0.5, u, n * tau_c, 0, ctl)[0]


def d_theta_j(j: int, u, n: int, tau, ctl: SeriesControl | None = None):
    """Derivative of :func:`theta_j` in ``u``."""
    tau_c, ctl = _prep(tau, ctl)
    return _series(_char_j(j, n), 0.5, u, n * tau_c, 1, ctl)[0]


def d2_theta_j(j: int, u, n: int, tau, ctl: SeriesControl | None = None):
    """Second derivative of :func:`theta_j` in ``u``."""
    tau_c, ctl = _prep(tau, ctl)
    return _series(_char_j(j, n), 0.5, u, n * tau_c, 2, ctl)[0]


def _check_floor(s, u, floor):
    small = np.abs(s) < floor
    if np.any(small):
        bad = np.asarray(u, dtype=complex)[small] if np.ndim(u) else u
        raise PoleAtLatticePoint(f"|sigma(u)| < {floor:g} at u={bad}")


def xi(u, tau, ctl: SeriesControl | None = None, floor: float = POLE_FLOOR):
    """Logarithmic derivative ``sigma'(u) / sigma(u)``.

    Raises
    ------
    PoleAtLatticePoint
        If ``|sigma(u)|`` is below ``floor``.
    """
    tau_c, ctl = _prep(tau, ctl)
    s = _series(0.5, 0.5, u, tau_c, 0, ctl)[0]
    _check_floor(s, u, floor)
    return _series(0.5, 0.5, u, tau_c, 1, ctl)[0] / s


def d_xi(u, tau, ctl: SeriesControl | None = None, floor: float = POLE_FLOOR):
    """Derivative of :func:`xi`, ``sigma''/sigma - xi^2``."""
    tau_c, ctl = _prep(tau, ctl)
    s = _series(0.5, 0.5, u, tau_c, 0, ctl)[0]
    _check_floor(s, u, floor)
    ds = _series(0.5, 0.5, u, tau_c, 1, ctl)[0]
    d2s = _series(0.5, 0.5, u, tau_c, 2, ctl)[0]
    return d2s / s - (ds / s) ** 2

import cmath
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ellrs.elliptic import (
    ModularParam,
    SeriesControl,
    ThetaChar,
    d2_theta_char,
    d_sigma,
    d_theta_char,
    d_xi,
    sigma,
    theta_char,
    theta_char_bound,
    theta_j,
    xi,
)
from ellrs.errors import InvalidModulus, NonConvergent, PoleAtLatticePoint

re_part = st.floats(-2.0, 2.0)
im_part = st.floats(-1.5, 1.5)
tau_re = st.floats(-0.5, 0.5)
tau_im = st.floats(0.6, 2.0)


def brute_theta(a, b, z, tau, terms=60):
    """High-precision direct sum, no argument reduction."""
    mp.mp.dps = 40
    z, tau = mp.mpc(z), mp.mpc(tau)
    s = mp.mpc(0)
    for m in range(-terms, terms + 1):
        k = m + a
        s += mp.exp(1j * mp.pi * (k * k * tau + 2 * k * (z + b)))
    return complex(s)


# --- oracles -------------------------------------------------------------------

def test_sigma_matches_jacobi_theta1():
    # sigma(z) = -theta_1(pi z, exp(i pi tau)) in Jacobi's normalization
    for tau in (1j, 0.3 + 1.1j, -0.2 + 0.7j):
        q = mp.exp(1j * mp.pi * tau)
        for z in (0.37 + 0.2j, -0.8 + 0.05j, 1.3 - 0.4j):
            ref = -complex(mp.jtheta(1, mp.pi * z, q))
            assert abs(sigma(z, tau) - ref) < 1e-14 * max(1, abs(ref))


def test_sigma_derivative_at_origin():
    # sigma'(0) = -pi theta_2 theta_3 theta_4 (Jacobi's identity), about -2.8487 at tau = i
    q = mp.exp(-mp.pi)
    ref = -complex(mp.pi * mp.jtheta(2, 0, q) * mp.jtheta(3, 0, q) * mp.jtheta(4, 0, q))
    assert abs(d_sigma(0.0, 1j) - ref) < 1e-13
    assert abs(ref + 2.8487) < 1e-4


@given(st.sampled_from([(0.5, 0.5), (0.0, 0.0), (0.5, 0.0), (1 / 6, 0.5), (-1 / 3, 0.5)]),
       re_part, im_part, tau_re, tau_im)
def test_theta_matches_brute_force(ab, x, y, tr, ti):
    a, b = ab
    tau = complex(tr, ti)
    z = complex(x, y * ti)
    ref = brute_theta(a, b, z, tau)
    val, bound = theta_char_bound(ThetaChar(a, b), z, tau)
    assert abs(val - ref) <= 1e-13 * max(1.0, abs(ref)) + 4 * bound


def test_theta_j_definition():
    n, tau = 3, 0.1 + 0.9j
    for j in range(n):
        ch = ThetaChar(0.5 - j / n, 0.5)
        for z in (0.2 + 0.1j, -0.4 + 0.6j):
            assert theta_j(j, z, n, tau) == pytest.approx(theta_char(ch, z, n * tau), abs=1e-15)
    assert theta_j(n + 1, 0.3, n, tau) == theta_j(1, 0.3, n, tau)


# --- properties ------------------------------------------------------------------

@given(re_part, im_part, tau_re, tau_im)
def test_sigma_odd(x, y, tr, ti):
    z, tau = complex(x, y), complex(tr, ti)
    s = sigma(z, tau)
    assert abs(s + sigma(-z, tau)) < 1e-13 * max(1.0, abs(s))


@given(re_part, im_part, tau_re, tau_im)
def test_sigma_quasi_periodicity(x, y, tr, ti):
    z, tau = complex(x, y), complex(tr, ti)
    s = sigma(z, tau)
    assert abs(sigma(z + 1, tau) + s) < 1e-12 * max(1.0, abs(s))
    # sigma(z + tau) = -exp(-i pi tau - 2 pi i z) sigma(z)
    lhs = sigma(z + tau, tau)
    rhs = -cmath.exp(-1j * math.pi * tau - 2j * math.pi * z) * s
    assert abs(lhs - rhs) < 1e-11 * max(1.0, abs(rhs))


@given(re_part, im_part)
def test_derivatives_match_finite_differences(x, y):
    ch, tau, z, h = ThetaChar(0.2, 0.5), 0.1 + 1.0j, complex(x, y), 1e-4
    fd1 = (theta_char(ch, z + h, tau) - theta_char(ch, z - h, tau)) / (2 * h)
    fd2 = (d_theta_char(ch, z + h, tau) - d_theta_char(ch, z - h, tau)) / (2 * h)
    scale = max(1.0, abs(d_theta_char(ch, z, tau)), abs(d2_theta_char(ch, z, tau)))
    assert abs(fd1 - d_theta_char(ch, z, tau)) < 1e-6 * scale
    assert abs(fd2 - d2_theta_char(ch, z, tau)) < 1e-6 * scale


def test_xi_and_its_derivative():
    tau, z, h = 1j, 0.31 + 0.12j, 1e-5
    assert xi(z, tau) == pytest.approx(d_sigma(z, tau) / sigma(z, tau), rel=1e-14)
    fd = (xi(z + h, tau) - xi(z - h, tau)) / (2 * h)
    assert d_xi(z, tau) == pytest.approx(fd, rel=1e-8)


def test_array_arguments_keep_shape():
    z = np.array([[0.1, 0.2 + 0.3j], [0.4 - 1.7j, 2.5]])
    out = sigma(z, 1j)
    assert out.shape == z.shape
    assert out[1, 0] == pytest.approx(sigma(0.4 - 1.7j, 1j), rel=1e-14)


def test_zero_at_origin_within_tail_bound():
    val, bound = theta_char_bound(ThetaChar(0.5, 0.5), 0.0, 1j)
    assert abs(val) < 1e-15 and bound < 1e-15


# --- errors --------------------------------------------------------------------

@pytest.mark.parametrize("tau", [0.3, 1 - 0.2j, 0j])
def test_invalid_modulus(tau):
    with pytest.raises(InvalidModulus):
        sigma(0.1, tau)
    with pytest.raises(ValueError):
        ModularParam(tau)


def test_nonconvergent_for_tiny_imaginary_part():
    with pytest.raises(NonConvergent):
        sigma(0.1, 1e-3j, SeriesControl(max_terms=10))


@pytest.mark.parametrize("z", [0.0, 1.0, 1j, 2 + 1j])
def test_xi_pole(z):
    with pytest.raises(PoleAtLatticePoint):
        xi(z, 1j)

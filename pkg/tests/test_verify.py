import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ellrs import verify as vf
from ellrs.cli import ScenarioConfig
from ellrs.lax import ModelParams
from ellrs.phase import random_phase_point


def setup(n, seed=0):
    P = ModelParams(n=n)
    rng = np.random.default_rng(seed)
    x = random_phase_point(rng, n)
    u, v = vf.random_spectral_pair(rng, P)
    return P, x, u, v


# --- report logic -------------------------------------------------------------------

def test_report_relative_to_larger_side():
    rep = vf._report("demo", np.array([1.0, 0.0]), np.array([0.0, 2.0]), 1.0, ("x",))
    assert rep.abs_residual == pytest.approx(math.sqrt(5))
    assert rep.rel_residual == pytest.approx(math.sqrt(5) / 2)
    assert not rep.passed


def test_report_falls_back_to_absolute_for_tiny_sides():
    rep = vf._report("demo", np.array([1e-12]), np.array([0.0]), 1e-10, ())
    assert rep.rel_residual == rep.abs_residual and rep.passed


def test_zero_tolerance_never_passes():
    P, x, u, v = setup(2)
    assert not vf.check_prop3(u, x, P, tol=0.0).passed
    assert not vf.check_R_identity(u - v, P, tol=0.0).passed


def test_digest_is_stable_and_sensitive():
    P, x, u, v = setup(3)
    assert vf.digest(u, x, P) == vf.digest(u, x, P)
    assert vf.digest(u, x, P) != vf.digest(u + 1e-12, x, P)
    assert len(vf.digest(u)) == 16


@given(st.integers(0, 2**32 - 1), st.integers(2, 6))
def test_spectral_pair_avoids_poles(seed, n):
    P = ModelParams(n=n)
    u, v = vf.random_spectral_pair(np.random.default_rng(seed), P)
    for z in (u, v, u - v, u + n * P.gamma, v + n * P.gamma):
        assert vf._grid_distance(z, P) >= 0.05


def test_grid_distance():
    P = ModelParams(n=4)
    assert vf._grid_distance(0.25 + P.tau, P) < 1e-15
    assert vf._grid_distance(0.125, P) == pytest.approx(0.125)


# --- individual checks pass where the identity holds ---------------------------------

@pytest.mark.parametrize("n", [2, 3])
def test_identity_checks(n):
    P, x, u, v = setup(n)
    w, _ = vf.random_spectral_pair(np.random.default_rng(99), P)
    reports = [
        vf.check_prop3(u, x, P),
        vf.check_sklyanin(u, v, x, P),
        vf.check_sklyanin(u, v, x, P, vf.FD),
        vf.check_cybe(u, v, w, P),
        vf.check_qybe(u, v, w, P),
        vf.check_symplectic(x, P),
        vf.check_lemma1(u, v, x, P),
        vf.check_TG_identity(u, v, x, 0.1, P),
        vf.check_linear_cm(u, v, x, 0.37, P),
        vf.check_cm_limit(u, x, 0.37, P),
        vf.check_involution(u, v, 2, 3, x, P),
        vf.check_hamiltonian_involution(u, 2, x, P),
        vf.check_skew3(u, v, x, P),
        vf.check_skew4(u, v, x, P),
    ]
    for r in reports:
        assert r.passed, r


def test_sklyanin_detects_wrong_orientation():
    # flipping the bracket sign must break the identity
    P, x, u, v = setup(2)
    L = vf._lax_obs("factorized", u, P)
    M = vf._lax_obs("factorized", v, P)
    lhs = -vf.rm.ORIENTATION * vf.bracket_matrix(L, M, x)
    L1, L2 = vf._L1L2(L(x), M(x))
    rhs = vf._comm(vf.rm.classical_r(u - v, P).data, L1 @ L2)
    assert np.linalg.norm(lhs - rhs) > 0.5 * np.linalg.norm(rhs)


@pytest.mark.parametrize("hbar", [0.05, 0.1, 0.2])
def test_tg_identity_across_hbar(hbar):
    P, x, u, v = setup(3, seed=2)
    assert vf.check_TG_identity(u, v, x, hbar, P).passed


def test_fd_and_analytic_agree_on_pass_fail():
    P, x, u, v = setup(3, seed=4)
    a = vf.check_sklyanin(u, v, x, P, tol=1e-6)
    f = vf.check_sklyanin(u, v, x, P, vf.FD, tol=1e-6)
    assert a.passed == f.passed


def test_discrimination_report_lists_all_variants():
    P, x, u, v = setup(2)
    rep = vf.check_s12_discrimination(u, v, x, P)
    for var in vf.rm.S12_VARIANTS:
        assert f"{var}=" in rep.notes


# --- suite ----------------------------------------------------------------------------

def small_config(**kw):
    base = dict(n_values=(2,), seeds=(0, 1), checks=("prop3", "cybe", "involution"))
    base.update(kw)
    return ScenarioConfig(**base).validate()


def test_suite_order_and_determinism():
    cfg = small_config()
    a = vf.run_suite(cfg)
    b = vf.run_suite(cfg)
    assert [r.to_dict() for r in a] == [r.to_dict() for r in b]
    names = [r.check_name for r in a]
    assert names == sorted(names)
    assert len(a) == 2 * (1 + 1 + 9)
    assert all(r.passed for r in a)


def test_suite_zero_tolerance_fails_everything():
    cfg = small_config(tolerances={"prop3": 0.0, "cybe": 0.0, "involution": 0.0})
    assert not any(r.passed for r in vf.run_suite(cfg))


def test_suite_turns_errors_into_failed_reports():
    # a spectral point on a pole raises inside the check
    cfg = small_config(spectral_points=((0.0, 0.3),), checks=("prop3",))
    reps = vf.run_suite(cfg)
    assert all(not r.passed and "SpectralPole" in r.notes for r in reps)

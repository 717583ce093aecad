"""Acceptance criteria 1-14, run at their stated tolerances.

Each test prints one line ``[criterion k] PASS|FAIL <title>: <measurements>``
and then asserts. Run directly with ``python tests/test_acceptance.py`` for
the summary lines alone.
"""
import sys
import time

import numpy as np
import pytest

from ellrs import cli
from ellrs import rmat as rm
from ellrs import verify as vf
from ellrs.errors import DegenerateTuple
from ellrs.lax import ModelParams
from ellrs.phase import random_phase_point

CM_S = 0.37
_printer = {"fn": print}


@pytest.fixture(autouse=True)
def _uncaptured(capsys):
    def emit(line):
        with capsys.disabled():
            print(line)
    _printer["fn"] = emit
    yield
    _printer["fn"] = print


def record(k: int, title: str, ok: bool, detail: str):
    _printer["fn"](f"[criterion {k:2d}] {'PASS' if ok else 'FAIL'} {title}: {detail}")
    assert ok, f"criterion {k} ({title}) failed: {detail}"


def draws(n, seed, count):
    """``count`` tuples ``(P, x, u, v)`` from one PCG64 stream."""
    P = ModelParams(n=n)
    rng = np.random.default_rng([seed, n])
    out = []
    for _ in range(count):
        x = random_phase_point(rng, n)
        u, v = vf.random_spectral_pair(rng, P)
        out.append((P, x, u, v))
    return out


def worst(reports):
    return max(r.rel_residual for r in reports)


def test_criterion_01_prop3_factorization():
    t0 = time.perf_counter()
    reps = [vf.check_prop3(u, x, P) for n in (2, 3, 4, 5) for P, x, u, v in draws(n, 1, 20)]
    dt = time.perf_counter() - t0
    ok = all(r.passed for r in reps) and dt < 5.0
    record(1, "gauge transform to the factorized operator", ok,
           f"{len(reps)} points, worst rel {worst(reps):.2e} (tol 1e-9), {dt:.2f} s (limit 5 s)")


def test_criterion_02_sklyanin_bracket():
    t0 = time.perf_counter()
    ana, fd = [], []
    for n in (2, 3, 4, 5):
        for P, x, u, v in draws(n, 2, 10):
            ana.append(vf.check_sklyanin(u, v, x, P, vf.ANALYTIC, tol=1e-9))
            fd.append(vf.check_sklyanin(u, v, x, P, vf.FD, tol=1e-6))
    dt = time.perf_counter() - t0
    ok = all(r.passed for r in ana + fd) and dt < 60.0
    record(2, "quadratic Sklyanin bracket", ok,
           f"analytic worst {worst(ana):.2e} (tol 1e-9), FD worst {worst(fd):.2e} (tol 1e-6), "
           f"{dt:.2f} s (limit 60 s)")


def test_criterion_03_cybe():
    cy, anti, zn = [], [], []
    for n in (2, 3, 4, 5):
        P = ModelParams(n=n)
        rng = np.random.default_rng([3, n])
        for _ in range(10):
            v1, v2 = vf.random_spectral_pair(rng, P)
            v3, _ = vf.random_spectral_pair(rng, P)
            cy.append(vf.check_cybe(v1, v2, v3, P, tol=1e-10))
            anti.append(vf.check_r_antisymmetry(v1 - v2, P, tol=1e-12))
            zn.append(vf.check_r_zn_symmetry(v1 - v2, P, tol=1e-12))
    ok = all(r.passed for r in cy + anti + zn)
    record(3, "classical Yang-Baxter equation", ok,
           f"CYBE worst {worst(cy):.2e} (tol 1e-10), antisymmetry {worst(anti):.2e}, "
           f"Z_n x Z_n {worst(zn):.2e} (tol 1e-12)")


def test_criterion_04_qybe():
    qy, zn, ident = [], [], []
    for n in (2, 3, 4, 5):
        P = ModelParams(n=n)
        rng = np.random.default_rng([4, n])
        tol = 1e-10 if n <= 3 else 1e-9
        for _ in range(5):
            v1, v2 = vf.random_spectral_pair(rng, P)
            v3, _ = vf.random_spectral_pair(rng, P)
            qy.append(vf.check_qybe(v1, v2, v3, P, tol=tol))
            zn.append(vf.check_R_zn_symmetry(v1 - v2, P, tol=1e-12))
            ident.append(vf.check_R_identity(v1 - v2, P, tol=1e-14))
    ok = all(r.passed for r in qy + zn + ident)
    record(4, "quantum Yang-Baxter equation", ok,
           f"QYBE worst {worst(qy):.2e} (tol 1e-10 / 1e-9), Z_n x Z_n {worst(zn):.2e} (tol 1e-12), "
           f"R(hbar=0) - 1 worst {worst(ident):.2e}")


def test_criterion_05_classical_limit():
    slopes = []
    for n in (2, 3, 4):
        P = ModelParams(n=n)
        rng = np.random.default_rng([5, n])
        for _ in range(3):
            u, v = vf.random_spectral_pair(rng, P)
            slopes.append(rm.classical_limit_residual(u - v, np.logspace(-4, -1, 7), P))
    ok = all(abs(s - 2) < 0.1 for s in slopes)
    record(5, "classical limit of R", ok,
           f"slopes in [{min(slopes):.4f}, {max(slopes):.4f}] (target 2 +- 0.1)")


def test_criterion_06_dynamical_quadratic_bracket():
    ana, fd, sk3, sk4, disc = [], [], [], [], []
    chosen = []
    for n in (2, 3):
        for P, x, u, v in draws(n, 6, 3):
            a = vf.check_dynamical_quadratic(u, v, x, P, "auto", vf.ANALYTIC, tol=1e-8)
            ana.append(a)
            chosen.append(a.notes.split(";")[0].split("=")[1])
            fd.append(vf.check_dynamical_quadratic(u, v, x, P, "auto", vf.FD, tol=1e-6))
            variant = chosen[-1]
            sk3.append(vf.check_skew3(u, v, x, P, variant, tol=1e-10))
            sk4.append(vf.check_skew4(u, v, x, P, variant, tol=1e-10))
            disc.append(vf.check_s12_discrimination(u, v, x, P))
    ok = all(r.passed for r in ana + fd + sk3 + sk4 + disc)
    record(6, "dynamical quadratic bracket", ok,
           f"best-variant analytic worst {worst(ana):.2e} (tol 1e-8), FD worst {worst(fd):.2e} (tol 1e-6), "
           f"Skew3 {worst(sk3):.2e}, Skew4 {worst(sk4):.2e} (tol 1e-10), "
           f"discrimination best/runner-up worst {worst(disc):.2e} (need <= 1e-3), selected {sorted(set(chosen))}")


def test_criterion_07_poisson_map():
    reps = [vf.check_symplectic(x, P, tol=1e-9) for n in (2, 3, 4, 5) for P, x, u, v in draws(n, 7, 10)]
    record(7, "momentum-shift map is symplectic", all(r.passed for r in reps),
           f"{len(reps)} points, worst ||J^T Omega J - Omega|| rel {worst(reps):.2e} (tol 1e-9)")


def test_criterion_08_appendix_identities():
    lem, tg = [], []
    for n in (2, 3):
        for P, x, u, v in draws(n, 8, 5):
            lem.append(vf.check_lemma1(u, v, x, P, tol=1e-9))
            for hbar in (0.05, 0.1, 0.2):
                tg.append(vf.check_TG_identity(u, v, x, hbar, P.with_(hbar=hbar), tol=1e-9))
    ok = all(r.passed for r in lem + tg)
    record(8, "commutator lemma and T = G", ok,
           f"lemma worst {worst(lem):.2e}, T = G worst {worst(tg):.2e} over hbar in {{0.05, 0.1, 0.2}} (tol 1e-9)")


def test_criterion_09_calogero_moser():
    lin, lim = [], []
    for n in (2, 3):
        for P, x, u, v in draws(n, 9, 5):
            lin.append(vf.check_linear_cm(u, v, x, CM_S, P, tol=1e-8))
            lim.append(vf.check_cm_limit(u, x, CM_S, P, (1e-2, 1e-3, 1e-4), tol=0.1))
    slopes = [float(r.notes.split("=")[1]) for r in lim]
    ok = all(r.passed for r in lin + lim)
    record(9, "Calogero-Moser linear bracket and limit", ok,
           f"linear bracket worst {worst(lin):.2e} (tol 1e-8), limit slopes in "
           f"[{min(slopes):.4f}, {max(slopes):.4f}] (target 1 +- 0.1)")


def test_criterion_10_involution():
    tr, ham = [], []
    for n in (2, 3):
        for P, x, u, v in draws(n, 10, 3):
            tr += [vf.check_involution(u, v, l, m, x, P, tol=1e-7) for l in (1, 2, 3) for m in (1, 2, 3)]
            ham += [vf.check_hamiltonian_involution(u, l, x, P, tol=1e-7) for l in (1, 2, 3)]
    ok = all(r.passed for r in tr + ham)
    record(10, "involution of spectral invariants", ok,
           f"trace brackets worst |.| {max(r.abs_residual for r in tr):.2e}, "
           f"Hamiltonian brackets worst |.| {max(r.abs_residual for r in ham):.2e} (tol 1e-7)")


def test_criterion_11_vandermonde():
    reps, cal = [], []
    for n in (2, 3, 4, 5):
        P = ModelParams(n=n)
        const = vf.lx.vandermonde_constant(n, P)
        rng = np.random.default_rng([11, n])
        done = 0
        while done < 20:
            u = rng.uniform(0, 1, n) + 1j * rng.uniform(-0.3, 0.3, n)
            try:
                reps.append(vf.check_vandermonde(u, P, const, tol=1e-10))
            except DegenerateTuple:
                continue
            done += 1
        for shift in (0.013, 0.2 + 0.1j, 0.37 - 0.05j):
            other = 0.1 * np.arange(1, n + 1) + 0.05 + shift
            cal.append(vf.check_vandermonde_calibration(n, P, other, tol=1e-10))
    ok = all(r.passed for r in reps + cal)
    record(11, "theta Vandermonde determinant", ok,
           f"{len(reps)} tuples worst {worst(reps):.2e}, calibration independence worst {worst(cal):.2e} (tol 1e-10)")


def test_criterion_12_twisting():
    sres, var, agree = [], [], []
    for n in (2, 3):
        pts = draws(n, 12, 5)
        P, x, u, v = pts[0]
        for which in ("s_plus", "s_minus"):
            sres.append(vf.check_twist_s(u, v, x, P, which, tol=1e-6))
        agree.append(vf.check_h12_classical(u, v, x, P, tol=1e-6))
        var.append(vf.check_h12_constancy(u, v, [p[1] for p in pts], P, tol=1e-10))
    ok = all(r.passed for r in sres + var + agree)
    record(12, "twisting to the numeric r-matrix", ok,
           f"s~+- worst {worst(sres):.2e} (tol 1e-6), h12 spread {worst(var):.2e} (tol 1e-10), "
           f"h12 vs r worst {worst(agree):.2e} (tol 1e-6)")


def test_criterion_13_determinism():
    a = cli.run(["suite", "--seed", "0", "--format", "json"])
    b = cli.run(["suite", "--seed", "0", "--format", "json"])
    same = a[1].encode() == b[1].encode()
    record(13, "suite output is byte-identical across runs", same and len(a[1]) > 0,
           f"{len(a[1].encode())} bytes, identical={same}")


def test_criterion_14_suite_runtime():
    t0 = time.perf_counter()
    reps = vf.run_suite(cli.ScenarioConfig())
    dt = time.perf_counter() - t0
    n_pass = sum(r.passed for r in reps)
    record(14, "default suite runtime", dt < 180.0,
           f"{len(reps)} reports ({n_pass} passed) in {dt:.1f} s (limit 180 s)")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "--no-header", "-p", "no:cacheprovider"]))

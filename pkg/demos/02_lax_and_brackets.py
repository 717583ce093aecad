"""
Lax operators and the quadratic bracket
=======================================

Build the three Lax operators at a random phase point, relate them by the
gauge matrix, and compare the Poisson bracket of the factorized one with the
commutator against the classical r-matrix.
"""

# %%
import numpy as np

from ellrs import lax as lx
from ellrs import rmat as rm
from ellrs.phase import BracketMethod, Observable, bracket_matrix, random_phase_point
from ellrs.verify import random_spectral_pair

rng = np.random.default_rng(7)
P = lx.ModelParams(n=3)
x = random_phase_point(rng, P.n)
u, v = random_spectral_pair(rng, P)
print("q =", x.q, "\np =", x.p, "\nu, v =", u, v)

# %%
# the root-free operator and the factorized one are gauge equivalent
g = lx.gauge_g(u, x, P)
Ln = lx.lax_nijhoff(u, x, P).entries
Lf = lx.lax_factorized(u, x, P).entries
print("||g Ln g^-1 - Lf|| =", np.linalg.norm(g @ Ln @ np.linalg.inv(g) - Lf))
print("spectra:", np.sort_complex(np.linalg.eigvals(Lf)))

# %%
# bracket of the factorized operator with itself, via analytic gradients
def lax_obs(w):
    return Observable(lambda y: lx.lax_factorized(w, y, P).entries,
                      lambda y: lx.lax_factorized_grad(w, y, P))

B = rm.ORIENTATION * bracket_matrix(lax_obs(u), lax_obs(v), x)
I = np.eye(P.n)
L1 = np.kron(lx.lax_factorized(u, x, P).entries, I)
L2 = np.kron(I, lx.lax_factorized(v, x, P).entries)
r = rm.classical_r(u - v, P).data
C = r @ L1 @ L2 - L1 @ L2 @ r
print("relative residual:", np.linalg.norm(B - C) / np.linalg.norm(C))

# %%
# the same with finite differences
B_fd = rm.ORIENTATION * bracket_matrix(lax_obs(u), lax_obs(v), x, BracketMethod("finite_difference"))
print("FD relative residual:", np.linalg.norm(B_fd - C) / np.linalg.norm(C))

# %%
# spectral invariants Poisson-commute
for l, m in [(1, 2), (2, 3), (3, 3)]:
    aq, ap = lx.trace_power_grad(u, l, x, P)
    bq, bp = lx.trace_power_grad(v, m, x, P)
    print(f"{{tr L^{l}, tr L^{m}}} =", np.sum(aq * bp - ap * bq))

"""
The Calogero-Moser limit
========================

Rescale the coupling and momenta by beta and watch the relativistic Lax
operator approach the nonrelativistic one linearly in beta.
"""

# %%
import numpy as np

from ellrs import lax as lx
from ellrs import rmat as rm
from ellrs.phase import Observable, bracket_matrix, random_phase_point
from ellrs.verify import random_spectral_pair

rng = np.random.default_rng(11)
P = lx.ModelParams(n=3)
s = 0.37
x = random_phase_point(rng, P.n)
u, v = random_spectral_pair(rng, P)

L = lx.lax_cm(u, x, s, P).entries
for beta in (1e-1, 1e-2, 1e-3, 1e-4):
    err = np.linalg.norm(L - lx.lax_cm_limit(u, x, s, beta, P))
    print(f"beta={beta:.0e}  ||L_CM - approx|| = {err:.3e}")

# %%
# the limiting operator has a linear r-matrix bracket with the same r
def cm(w):
    return Observable(lambda y: lx.lax_cm(w, y, s, P).entries, lambda y: lx.lax_cm_grad(w, y, s, P))

B = rm.ORIENTATION * bracket_matrix(cm(u), cm(v), x)
I = np.eye(P.n)
S = np.kron(lx.lax_cm(u, x, s, P).entries, I) + np.kron(I, lx.lax_cm(v, x, s, P).entries)
r = rm.classical_r(u - v, P).data
print("relative residual:", np.linalg.norm(B - (r @ S - S @ r)) / np.linalg.norm(B))

"""
Classical and quantum R-matrices
================================

Yang-Baxter residuals, the Z_n x Z_n symmetry, and the classical limit of R.
"""

# %%
import numpy as np

from ellrs import rmat as rm
from ellrs.lax import ModelParams
from ellrs.verify import random_spectral_pair

rng = np.random.default_rng(3)
for n in (2, 3, 4):
    P = ModelParams(n=n)
    v1, v2 = random_spectral_pair(rng, P)
    v3, _ = random_spectral_pair(rng, P)
    print(f"n={n}: CYBE {rm.cybe_residual(v1, v2, v3, P):.1e}, QYBE {rm.qybe_residual(v1, v2, v3, P):.1e}")

# %%
# sparsity pattern: only entries with i + j = l + k (mod n) are nonzero
P = ModelParams(n=3)
r = rm.classical_r(0.31 + 0.07j, P).data
print((np.abs(r) > 0).astype(int))

# %%
# conjugation by the clock and shift matrices leaves R unchanged
cs = rm.clock_shift(3)
R = rm.quantum_R(0.31 + 0.07j, P).data
for a in (cs.g, cs.h):
    aa = np.kron(a, a)
    print(np.linalg.norm(aa @ R @ np.linalg.inv(aa) - R))

# %%
# R = 1 + i hbar r + O(hbar^2): the residual falls off with slope 2
hbar = np.logspace(-4, -1, 7)
res = rm.classical_limit_data(0.31 + 0.07j, hbar, P)
for h, e in zip(hbar, res):
    print(f"hbar={h:.1e}  residual={e:.3e}")
print("slope", np.polyfit(np.log(hbar), np.log(res), 1)[0])

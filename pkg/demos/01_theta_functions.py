"""
Theta functions and sigma
=========================

Evaluate the building blocks and look at their zeros and quasi-periods.
"""

# %%
import numpy as np

from ellrs.elliptic import ThetaChar, d_sigma, sigma, theta_char_bound, theta_j, xi

tau = 1j

# sigma is odd, vanishes on the lattice Z + tau Z and flips sign under z -> z + 1
z = np.array([0.0, 0.5, 1.0, 0.3 + 0.2j, -0.3 - 0.2j, 1.3 + 0.2j])
print("sigma(z):", np.round(sigma(z, tau), 12))

# its slope at the origin is not one
print("sigma'(0) =", d_sigma(0.0, tau))

# %%
# every value comes with a bound on the truncated tail
val, bound = theta_char_bound(ThetaChar(0.5, 0.5), 0.25 + 3.7j, tau)
print(f"value {val:.6e}, tail bound {bound:.2e}")

# %%
# theta^(j) at modulus n tau vanishes at j tau (mod 1 and n tau)
n = 3
for j in range(n):
    print(j, abs(theta_j(j, j * tau, n, tau)), abs(theta_j(j, j * tau + 0.5, n, tau)))

# %%
# xi = sigma'/sigma has simple poles on the lattice
u = np.linspace(0.05, 0.95, 7)
print("xi on the real segment:", np.round(xi(u, tau).real, 6))

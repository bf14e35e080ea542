# coding: utf-8

# # Explicit inverse of the seven-diagonal matrix
#
# The interior stencil of A_n is (-1, 12, -39, 56, -39, 12, -1).  It factors
# as B_n C_n plus a rank-2 corner correction, where C_n = tridiag(-1, 8, -1)
# and B_n is pentadiagonal.  Every entry of A_n^{-1} then has a closed form
# in the integer sequence gamma_k (gamma_k = 8 gamma_{k-1} - gamma_{k-2}).

import numpy as np

from heptainv import SystemSpec, assemble_inverse, build_a, build_b, build_c, gamma, rank_two_factors
from heptainv.oracle import dense_invert, relative_error

np.set_printoptions(linewidth=120, precision=6, suppress=True)

# ## The matrices for n = 7

spec = SystemSpec(7, "toeplitz")
print(build_a(spec).to_dense())

# The splitting is exact in integers.

f = rank_two_factors(spec)
rest = build_a(spec).to_dense() - build_b(spec).to_dense() @ build_c(7).to_dense() - f.sigma * f.U @ f.V.T
print("max |A - (BC + UV^T)| =", np.abs(rest).max())

# ## The gamma sequence
#
# Python integers keep gamma_k exact long after it leaves double range.

print([gamma(k) for k in range(8)])
print("gamma_400 has", len(str(gamma(400))), "digits")

# ## Closed form against dense elimination

for variant in ("toeplitz", "near"):
    for n in (7, 33, 128):
        s = SystemSpec(n, variant)
        explicit = assemble_inverse(s)
        dense = dense_invert(build_a(s)).inverse
        _, rel = relative_error(explicit, dense)
        print(f"{variant:8s} n={n:4d}  max rel diff {rel:.2e}  min entry {explicit.min():.3e}")

# All entries are positive, and the inverse is symmetric and centrosymmetric.

x = assemble_inverse(SystemSpec(9, "near"))
print(np.allclose(x, x.T), np.allclose(x, x[::-1, ::-1]))
print(x[:3, :3])

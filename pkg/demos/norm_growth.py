# coding: utf-8

# # Growth of the inverse norm
#
# The infinity norm of A_n^{-1} grows like n^4.  The closed-form bound
# follows it closely: the ratio bound/exact tends to 1.

import numpy as np

from heptainv import SystemSpec, bound_breakdown, norm_sweep

# ## Sweep

ns = [7, 10, 20, 50, 100, 200, 500, 1000, 2000]
for variant in ("toeplitz", "near"):
    print(f"\n{variant}")
    print(f"{'n':>6s} {'exact':>14s} {'bound':>14s} {'ratio':>8s} {'exact/n^4':>10s}")
    for n, exact, bound in norm_sweep(variant, ns):
        print(f"{n:6d} {exact:14.6e} {bound:14.6e} {bound / exact:8.4f} {exact / n**4:10.6f}")

# The n^4 coefficients approach 1/2304 (about 0.000434) for both variants.
#
# ## What goes into the bound
#
# The bound is assembled from three pieces: the norm of D^{-1} = C^{-1}B^{-1},
# the last row sum of D^{-1}, and the largest row sum of D^{-1}U.

bd = bound_breakdown(SystemSpec(64, "near"))
for key, value in bd.as_dict().items():
    print(f"{key:>14s}  {value}")
for check, ok in bd.dominance().items():
    print(f"{'ok ' if ok else 'BAD'} {check}")

# ## Optional plot
#
# matplotlib is not a dependency; the figure is drawn only when it is present.

try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    rows = np.array(norm_sweep("toeplitz", range(7, 2001, 7)))
    fig, ax = plt.subplots()
    ax.loglog(rows[:, 0], rows[:, 1], label="exact")
    ax.loglog(rows[:, 0], rows[:, 2], "--", label="bound")
    ax.set_xlabel("n")
    ax.set_ylabel("inverse norm")
    ax.legend()
    fig.savefig("norm_growth.png", dpi=120)  # written to the working directory
    print("wrote norm_growth.png")

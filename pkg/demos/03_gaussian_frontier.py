"""
Bounded and unbounded Gaussian Toeplitz operators
=================================================

T_{phi_xi} has eigenvalue moduli in geometric progression with ratio
1/|1 + 1/xi|. This script checks the classification against how the
operator norm behaves as the truncation grows.
"""

# %%
from fock_qha import BasisTruncation
from fock_qha.operators import gaussian_toeplitz
from fock_qha.spectral import convergence_table
from fock_qha.verify import RunConfig, check_gaussian_frontier, find_unbounded_admissible, frontier_grid

xi = find_unbounded_admissible()
print(f"admissible parameter with an unbounded operator: xi = {xi:.4f}")
print(f"eigenvalue ratio 1/|1+1/xi| = {1 / abs(1 + 1 / xi):.4f}")

# %%
for label, value in (("xi = 1", 1.0), ("xi = i", 1j), ("unbounded xi", xi)):
    tab = convergence_table(lambda K: gaussian_toeplitz(value, BasisTruncation(1, K)), [8, 16, 32, 64])
    norms = ", ".join(f"{v:.4g}" for v in tab.op_norms)
    print(f"{label:13s} op norms [{norms}]  -> {tab.growth()}")

# %% [markdown]
# The full scan over the parameter grid.

# %%
rep = check_gaussian_frontier(frontier_grid(), RunConfig())
print(f"{rep.params['grid_size']} parameters, {rep.notes['unbounded_count']} unbounded, "
      f"{int(rep.residual)} disagreements")

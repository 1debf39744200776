"""
Heat semigroup and quantum convolutions
=======================================

A walk through the truncated Fock basis: the operators Phi_t, their trace
norms, and how convolving two of them produces a Gaussian function.
"""

# %%
import numpy as np

from fock_qha import BasisTruncation, heat_kernel, heat_semigroup, spectral_summary
from fock_qha.qha_conv import berezin, convolve_fn_op, convolve_op_op

trunc = BasisTruncation(n=1, K=60)

# %% [markdown]
# Phi_t is diagonal in the monomial basis with eigenvalues t^m / (1+t)^(m+1).
# For t >= 0 its trace norm is one; for -1/2 < t < 0 it is 1/(1+2t).

# %%
for t in (1.0, 0.0, -0.25, -0.4):
    op = heat_semigroup(t, BasisTruncation(1, 200))
    summary = spectral_summary(op, ps=(1,))
    print(f"t={t:+.2f}  leading eigenvalues {np.round(op.eigenvalues[:3].real, 4)}  "
          f"trace norm {summary.schatten[1]:.10f}")

# %% [markdown]
# Convolving two semigroup members gives a function. The result is the
# Gaussian phi_{s+t+1}, so at the origin it equals 1/(s+t+1).

# %%
s, t = 0.5, 0.25
points = np.array([[0j], [0.5 + 0.5j], [1.0 + 0j]])
res = convolve_op_op(heat_semigroup(s, trunc), heat_semigroup(t, trunc), points)
print("Phi_s * Phi_t :", np.round(res.payload.values.real, 12))
print("phi_(s+t+1)   :", np.round(heat_kernel(s + t + 1)(points).real, 12))
print("leakage       :", res.leakage)

# %% [markdown]
# Convolving a function with an operator gives an operator. A heat kernel
# applied to Phi_s shifts the semigroup parameter.

# %%
out = BasisTruncation(1, 12)
res = convolve_fn_op(heat_kernel(0.5), heat_semigroup(-0.25, BasisTruncation(1, 40)), out=out)
print("diagonal of phi_0.5 * Phi_-0.25:", np.round(np.diag(res.payload.matrix).real[:4], 10))
print("eigenvalues of Phi_0.25        :", np.round(heat_semigroup(0.25, out).eigenvalues.real[:4], 10))

# %% [markdown]
# The Berezin transform is convolution with the vacuum projection Phi_0.

# %%
print("B(Phi_1)(0) =", berezin(heat_semigroup(1.0, trunc), np.array([[0j]])).values[0].real)

"""Truncated Bargmann-Fock space: multi-indices, the monomial basis, kernels.

The orthonormal basis of the Fock space over C^n is

    e_m(z) = sqrt(pi^|m| / m!) z^m,

and a truncation keeps every multi-index of total degree at most ``K``,
ordered graded-lexicographically (degree first, then ascending lex order).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from math import comb

import numpy as np

MultiIndex = tuple[int, ...]


def enumerate_indices(n: int, K: int) -> list[MultiIndex]:
    """All multi-indices in ``n`` variables with total degree ``<= K``.

    The order is graded lexicographic: degree ascending, ties broken by
    ascending lexicographic order of the tuples.

    >>> enumerate_indices(2, 1)
    [(0, 0), (0, 1), (1, 0)]
    """
    if int(n) != n or n < 1:
        raise ValueError(f"complex dimension n must be an integer >= 1, got {n!r}")
    if int(K) != K or K < 0:
        raise ValueError(f"max degree K must be an integer >= 0, got {K!r}")
    out: list[MultiIndex] = []
    for d in range(K + 1):
        out.extend(_compositions(d, n))
    return out


def _compositions(d: int, n: int) -> list[MultiIndex]:
    if n == 1:
        return [(d,)]
    res = []
    for first in range(d + 1):
        for rest in _compositions(d - first, n - 1):
            res.append((first,) + rest)
    return res


@dataclass(frozen=True)
class BasisTruncation:
    """The span of ``e_m`` with ``|m| <= K`` in ``n`` complex variables."""

    n: int
    K: int
    indices: tuple[MultiIndex, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(enumerate_indices(self.n, self.K)))

    @property
    def D(self) -> int:
        return comb(self.K + self.n, self.n)

    def __len__(self):
        return self.D

    @cached_property
    def index_array(self) -> np.ndarray:
        """Integer array of shape ``(D, n)`` with one multi-index per row."""
        return np.array(self.indices, dtype=np.int64).reshape(self.D, self.n)

    @cached_property
    def degrees(self) -> np.ndarray:
        return self.index_array.sum(axis=1)

    @cached_property
    def _positions(self) -> dict[MultiIndex, int]:
        return {m: i for i, m in enumerate(self.indices)}

    def position(self, m) -> int:
        m = tuple(int(v) for v in m)
        try:
            return self._positions[m]
        except KeyError:
            raise KeyError(f"multi-index {m} not in truncation n={self.n}, K={self.K}") from None

    def shell(self, degree: int) -> np.ndarray:
        """Positions of all multi-indices with ``|m| == degree``."""
        return np.flatnonzero(self.degrees == degree)

    def to_dict(self) -> dict:
        return {"n": self.n, "K": self.K, "D": self.D}


@dataclass(frozen=True)
class FockVector:
    """Coefficients of a Fock function against the orthonormal basis."""

    coeffs: np.ndarray
    truncation: BasisTruncation

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.coeffs) ** 2)))

    def inner(self, other: "FockVector") -> complex:
        """``<self, other>``, linear in the first slot."""
        return complex(np.vdot(other.coeffs, self.coeffs))

    @property
    def leakage(self) -> float:
        """``1 - ||coeffs||^2``; meaningful for vectors of unit norm before truncation."""
        return float(max(0.0, 1.0 - self.norm() ** 2))

    def evaluate(self, z) -> np.ndarray:
        """Value of ``sum_m c_m e_m`` at points ``z`` of shape ``(..., n)``."""
        table = monomial_table(np.asarray(z, dtype=complex), self.truncation)
        return table @ self.coeffs


def _axis_table(z: np.ndarray, K: int) -> np.ndarray:
    # e_k(z) = e_{k-1}(z) * sqrt(pi) z / sqrt(k); avoids forming pi^k or k!.
    out = np.empty(z.shape + (K + 1,), dtype=complex)
    out[..., 0] = 1.0
    step = np.sqrt(np.pi) * z
    for k in range(1, K + 1):
        out[..., k] = out[..., k - 1] * step / np.sqrt(k)
    return out


def monomial_table(z, trunc: BasisTruncation) -> np.ndarray:
    """``e_m(z)`` for every basis index, shape ``z.shape[:-1] + (D,)``.

    ``z`` must have trailing dimension ``n``.  Complex values are accepted
    as-is, so passing a non-conjugate second coordinate set evaluates the
    polynomial continuation used by the complex-scaled quadrature.
    """
    z = np.asarray(z, dtype=complex)
    if z.shape[-1] != trunc.n:
        raise ValueError(f"points must have trailing dimension {trunc.n}, got shape {z.shape}")
    idx = trunc.index_array
    out = np.ones(z.shape[:-1] + (trunc.D,), dtype=complex)
    for j in range(trunc.n):
        tab = _axis_table(z[..., j], trunc.K)
        out *= tab[..., idx[:, j]]
    return out


def monomial_value(m, z) -> complex:
    """``e_m(z) = prod_j sqrt(pi^{m_j} / m_j!) z_j^{m_j}``."""
    m = tuple(int(v) for v in m)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if len(m) != z.shape[-1]:
        raise ValueError(f"multi-index {m} and point of dimension {z.shape[-1]} disagree")
    val = 1.0 + 0.0j
    for mj, zj in zip(m, z):
        if mj < 0:
            raise ValueError(f"multi-index entries must be >= 0, got {m}")
        val *= _axis_table(np.asarray(zj), mj)[mj]
    return complex(val)


def kernel_coefficients(z, trunc: BasisTruncation) -> FockVector:
    """Coefficients of the normalized reproducing kernel ``k_z`` in the truncation.

    ``<k_z, e_m> = exp(-pi |z|^2 / 2) conj(e_m(z))``.  The truncated vector has
    norm at most one; its deficiency ``1 - ||.||^2`` is the truncation leakage.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    coeffs = np.exp(-np.pi * np.sum(np.abs(z) ** 2) / 2) * np.conj(monomial_table(z, trunc))
    return FockVector(coeffs, trunc)


def kernel_table(points, trunc: BasisTruncation) -> np.ndarray:
    """Rows of ``kernel_coefficients`` for many points, shape ``(P, D)``."""
    pts = np.asarray(points, dtype=complex).reshape(-1, trunc.n)
    damp = np.exp(-np.pi * np.sum(np.abs(pts) ** 2, axis=1) / 2)
    return damp[:, None] * np.conj(monomial_table(pts, trunc))


def parity_sign(m) -> int:
    """Eigenvalue ``(-1)^|m|`` of the parity operator ``Uf(z) = f(-z)`` on ``e_m``."""
    return -1 if sum(m) % 2 else 1


def parity_vector(trunc: BasisTruncation) -> np.ndarray:
    return np.where(trunc.degrees % 2 == 0, 1.0, -1.0)


def apply_parity(v: FockVector) -> FockVector:
    return FockVector(parity_vector(v.truncation) * v.coeffs, v.truncation)


def kernel_leakage_closed_form(z, K: int) -> float:
    """``1 - ||P_K k_z||^2`` for ``n = 1``: the Poisson tail ``P(N > K)``, mean ``pi|z|^2``."""
    from scipy.stats import poisson

    x = np.pi * abs(complex(z)) ** 2
    return float(poisson.sf(K, x))


__all__ = [
    "MultiIndex",
    "BasisTruncation",
    "FockVector",
    "enumerate_indices",
    "monomial_value",
    "monomial_table",
    "kernel_coefficients",
    "kernel_table",
    "parity_sign",
    "parity_vector",
    "apply_parity",
    "kernel_leakage_closed_form",
]

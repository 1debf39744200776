"""Gauss-Hermite tensor quadrature for the Gaussian probability measure on C^n.

Every integral has the form ``int f(z) exp(-pi |z|^2) dm(z)``.  Standard
Hermite nodes for ``exp(-x^2)`` are rescaled by ``1/sqrt(pi)`` per real axis
and tensored over the ``2n`` real coordinates ``(Re z_1, Im z_1, ...)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DEFAULT_NODE_BUDGET = 10**8
DEFAULT_ORDER = {1: 40, 2: 20}


class QuadratureError(ValueError):
    """Raised for an invalid grid request or a non-finite integrand."""


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """Tensor Gauss-Hermite rule; ``nodes`` has shape ``(Q**(2n), n)``."""

    n: int
    Q: int
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def size(self) -> int:
        return len(self.weights)

    def meta(self) -> dict:
        return {"n": self.n, "Q": self.Q, "nodes": self.size}


def default_order(n: int) -> int:
    return DEFAULT_ORDER.get(n, 8)


def build_grid(n: int, Q: int | None = None, node_budget: int = DEFAULT_NODE_BUDGET) -> QuadratureGrid:
    """Tensor grid exact for polynomials of per-axis degree ``<= 2Q - 1``."""
    if Q is None:
        Q = default_order(n)
    if int(n) != n or n < 1:
        raise QuadratureError(f"n must be an integer >= 1, got {n!r}")
    if int(Q) != Q or Q < 1:
        raise QuadratureError(f"Q must be an integer >= 1, got {Q!r}")
    if Q ** (2 * n) > node_budget:
        raise QuadratureError(
            f"grid with Q={Q}, n={n} has {Q ** (2 * n)} nodes, above the budget {node_budget}"
        )
    x, w = np.polynomial.hermite.hermgauss(Q)
    x = x / np.sqrt(np.pi)
    w = w / np.sqrt(np.pi)
    axes_x = np.meshgrid(*([x] * (2 * n)), indexing="ij")
    axes_w = np.meshgrid(*([w] * (2 * n)), indexing="ij")
    coords = np.stack([a.ravel() for a in axes_x], axis=1)
    weights = np.prod(np.stack([a.ravel() for a in axes_w], axis=1), axis=1)
    nodes = coords[:, 0::2] + 1j * coords[:, 1::2]
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureGrid(n=n, Q=Q, nodes=nodes, weights=weights)


def _check_finite(values: np.ndarray, nodes: np.ndarray, what: str = "integrand"):
    bad = ~np.isfinite(values)
    if np.any(bad):
        # first offending node in the flattened node order
        flat = np.flatnonzero(bad.reshape(bad.shape[0], -1).any(axis=1))[0]
        raise QuadratureError(f"non-finite {what} at node {flat}: z={nodes[flat]}")


def compensated_sum(values, weights=None) -> complex:
    """Weighted sum in fixed node order with exact-rounded real and imaginary parts."""
    v = np.asarray(values, dtype=complex)
    if weights is not None:
        v = v * np.asarray(weights)
    return complex(math.fsum(v.real.tolist()), math.fsum(v.imag.tolist()))


def integrate(grid: QuadratureGrid, f) -> complex:
    """``sum_j w_j f(z_j)``, approximating ``int f exp(-pi|z|^2) dm``.

    ``f`` is called once with the full ``(N, n)`` node array and must return
    an array of ``N`` values.
    """
    vals = np.asarray(f(grid.nodes), dtype=complex).reshape(grid.size)
    _check_finite(vals, grid.nodes)
    return compensated_sum(vals, grid.weights)


def integrate_shifted(grid: QuadratureGrid, g, smooth_factor) -> complex:
    """``int g(z) smooth_factor(z) exp(-pi|z|^2) dm(z)``.

    The caller guarantees that the original Lebesgue-measure integrand was
    rewritten exactly in this form (Gaussian factor extracted).
    """
    gv = np.asarray(g(grid.nodes), dtype=complex).reshape(grid.size)
    _check_finite(gv, grid.nodes, "g")
    sv = np.asarray(smooth_factor(grid.nodes), dtype=complex).reshape(grid.size)
    _check_finite(sv, grid.nodes, "smooth factor")
    return compensated_sum(gv * sv, grid.weights)


def weighted_array_sum(weights: np.ndarray, chunk_values, n_nodes: int, chunk: int = 256) -> np.ndarray:
    """Compensated weighted sum of array-valued integrands.

    ``chunk_values(sl)`` returns the integrand for nodes ``sl`` with shape
    ``(len(sl), ...)``.  Each chunk is reduced with a tensor contraction and
    the partial sums are merged in fixed order with Neumaier compensation.
    """
    total = None
    comp = None
    for start in range(0, n_nodes, chunk):
        sl = slice(start, min(start + chunk, n_nodes))
        vals = np.asarray(chunk_values(sl))
        if not np.all(np.isfinite(vals)):
            bad = start + int(np.flatnonzero(~np.isfinite(vals).reshape(vals.shape[0], -1).all(axis=1))[0])
            raise QuadratureError(f"non-finite integrand at node {bad}")
        part = np.tensordot(weights[sl], vals, axes=(0, 0))
        if total is None:
            total = part.astype(complex)
            comp = np.zeros_like(total)
            continue
        total, comp = _neumaier_step(total, comp, part)
    return total + comp


def _neumaier_step(total, comp, x):
    t = total + x
    corr = _two_sum_error(total.real, x.real, t.real) + 1j * _two_sum_error(total.imag, x.imag, t.imag)
    return t, comp + corr


def _two_sum_error(s, x, t):
    return np.where(np.abs(s) >= np.abs(x), (s - t) + x, (x - t) + s)


def scaled_coordinates(grid: QuadratureGrid, c: complex):
    """Nodes for ``int h(z) exp(-pi c |z|^2) dm(z)`` with ``Re c > 0``.

    Each real coordinate ``x`` is replaced by ``u / sqrt(c)`` (principal
    root), returning ``(z, zb, jac)`` where ``z = x + i y`` and
    ``zb = x - i y`` are evaluated at the complex coordinates and
    ``jac = c**(-n)``.  For polynomial ``h(z, zb)`` the rule is exact under
    the same degree condition as the unscaled grid; for real ``c`` the
    second coordinate set is the complex conjugate of the first.
    """
    c = complex(c)
    if c.real <= 0:
        raise QuadratureError(f"Gaussian scale must have positive real part, got {c}")
    r = 1.0 / np.sqrt(c)
    x = grid.nodes.real * r
    y = grid.nodes.imag * r
    return x + 1j * y, x - 1j * y, c ** (-grid.n)


def gaussian_moment(degrees_x, degrees_y) -> float:
    """Closed-form ``int prod x_j^{a_j} y_j^{b_j} exp(-pi|z|^2) dm``."""
    out = 1.0
    for d in list(degrees_x) + list(degrees_y):
        if d % 2:
            return 0.0
        # int x^d exp(-pi x^2) dx = Gamma((d+1)/2) / pi^{(d+1)/2}
        out *= math.gamma((d + 1) / 2) / math.pi ** ((d + 1) / 2)
    return out


__all__ = [
    "QuadratureGrid",
    "QuadratureError",
    "build_grid",
    "default_order",
    "integrate",
    "integrate_shifted",
    "compensated_sum",
    "weighted_array_sum",
    "scaled_coordinates",
    "gaussian_moment",
]

"""QHA convolutions in the truncated basis.

* ``a * S = int a(z) W_z S W_z^* dm(z)``  (function with operator, an operator)
* ``(S * T)(z) = Tr(S W_z U T U W_z^*)``  (two operators, a function)
* Berezin transform ``B(S)(z) = <S k_z, k_z> = (S * Phi)(z)``
* heat flow ``B_t(a) = T_a * Phi_{t-1}`` and the reconstruction
  ``T_a = B_t(a) * Phi_{-t}`` for ``0 < t < 1/2``.

For an operator supported in the truncation, every matrix element of
``W_z S W_z^*`` is ``exp(-pi|z|^2)`` times a polynomial in ``(z, conj z)``,
so the Lebesgue integral in ``a * S`` is a Gaussian integral and runs on the
Gauss-Hermite grid.  A Gaussian symbol adds its own factor, which is folded
into a matched (possibly complex) scaling of the nodes.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .fock_core import BasisTruncation, kernel_table, parity_vector
from .operators import OperatorMatrix, TruncationMismatch, displacement_poly, heat_semigroup
from .quadrature import QuadratureGrid, build_grid, scaled_coordinates, weighted_array_sum
from .symbols import SampledFunction, Symbol, default_points

DEFAULT_LEAKAGE_THRESHOLD = 1e-4


@dataclass(frozen=True, eq=False)
class ConvolutionResult:
    """A convolution payload with its truncation-leakage diagnostic.

    ``leakage`` lies in ``[0, 1]``; ``degraded`` is set when it exceeds the
    threshold the result was computed with.
    """

    payload: object
    leakage: float
    quad_meta: dict = field(default_factory=dict)
    threshold: float = DEFAULT_LEAKAGE_THRESHOLD

    @property
    def degraded(self) -> bool:
        return self.leakage > self.threshold


def _shell_norms(S) -> np.ndarray:
    """Largest row/column norm of ``S`` on each degree shell ``|m| = d``."""
    trunc = S.truncation
    M = S.matrix
    col = np.sqrt(np.sum(np.abs(M) ** 2, axis=0))
    row = np.sqrt(np.sum(np.abs(M) ** 2, axis=1))
    both = np.maximum(col, row)
    return np.array([both[trunc.degrees == d].max() for d in range(trunc.K + 1)])


def truncation_tail(S) -> float:
    """Estimated trace-norm mass of ``S`` beyond its truncation.

    The last two degree shells give a geometric ratio ``rho``; the tail is
    ``shell_K * rho / (1 - rho)``.  A vanishing outer shell means ``S`` is
    genuinely finite-rank in the basis and the tail is zero; a
    non-decaying shell sequence gives ``inf``.
    """
    shells = _shell_norms(S)
    last = shells[-1]
    if last == 0:
        return 0.0
    if len(shells) < 2 or shells[-2] == 0:
        return float("inf")
    rho = last / shells[-2]
    if rho >= 1:
        return float("inf")
    return float(last * rho / (1 - rho))


def _norm2(M) -> float:
    return float(np.linalg.norm(M, 2)) if M.size else 0.0


def _outer_scale(S) -> float:
    """Size of ``S`` just beyond its window: the last shell if shells decay, else ``||S||``."""
    shells = _shell_norms(S)
    if len(shells) >= 2 and 0 < shells[-1] < shells[-2]:
        return float(shells[-1])
    if shells[-1] == 0:
        return 0.0
    return _norm2(S.matrix)


def _symbol_sup(a: Symbol, grid: QuadratureGrid) -> float:
    if a.bounded_hint is not None:
        return float(a.bounded_hint)
    return float(np.max(np.abs(a(grid.nodes))))


def _conjugated_blocks(z, zb, S, out: BasisTruncation) -> np.ndarray:
    """Polynomial part of ``<W_z S W_z^* e_m, e_k>``, shape ``(N, D_out, D_out)``.

    The full matrix element is ``exp(-pi z.zb)`` times the returned value.
    """
    P = displacement_poly(z, zb, out, S.truncation)
    Pc = displacement_poly(zb, z, out, S.truncation)
    if S.is_diagonal:
        return np.einsum("nki,i,nmi->nkm", P, S.eigenvalues, Pc, optimize=True)
    return np.einsum("nki,ij,nmj->nkm", P, S.matrix, Pc, optimize=True)


def convolve_fn_op(a: Symbol, S, grid: QuadratureGrid | None = None, out: BasisTruncation | None = None,
                   leakage_threshold: float = DEFAULT_LEAKAGE_THRESHOLD, chunk: int = 64) -> ConvolutionResult:
    """``a * S`` restricted to the output truncation ``out`` (default: that of ``S``).

    ``S`` is treated as exactly finite-rank in its own truncation; to
    approximate an infinite-rank operator, pass it at a larger degree than
    ``out``.  The quadrature is exact for polynomial symbols once
    ``Q > K_out + K_S + deg(a)/2``; Gaussian symbols are exact under
    ``Q > K_out + K_S``.
    """
    trunc_S = S.truncation
    out = trunc_S if out is None else out
    if out.n != trunc_S.n or out.K > trunc_S.K:
        raise TruncationMismatch(f"output truncation K={out.K} must not exceed the operator's K={trunc_S.K}")
    n = out.n
    if grid is None:
        grid = build_grid(n, max(out.K + trunc_S.K + 2, 40) if n == 1 else 20)
    if a.is_gaussian:
        c = 1 + 1 / complex(a.xi)
        z, zb, jac = scaled_coordinates(grid, c)
        weights = grid.weights * (a.gaussian_prefactor() * jac)
        route = "gaussian_matched_weight"
    else:
        z = grid.nodes
        zb = np.conj(z)
        vals = a(z)
        if not np.all(np.isfinite(vals)):
            bad = int(np.flatnonzero(~np.isfinite(vals))[0])
            raise ValueError(f"non-finite symbol value at node {bad}: z={z[bad]}")
        weights = grid.weights * vals
        route = "standard_grid"
    entries = weighted_array_sum(weights, lambda sl: _conjugated_blocks(z[sl], zb[sl], S, out),
                                 grid.size, chunk)
    tail = truncation_tail(S)
    leak = 0.0 if tail == 0 else min(1.0, _symbol_sup(a, grid) * tail)
    prov = {"op": "convolve_fn_op", "symbol": a.describe(), "operator": S.provenance,
            "K_operator": trunc_S.K, "Q": grid.Q, "route": route}
    mat = OperatorMatrix(entries, out, prov)
    meta = {"Q": grid.Q, "route": route, "K_operator": trunc_S.K, "K_out": out.K,
            "exact_degree_ok": bool(grid.Q > out.K + trunc_S.K)}
    res = ConvolutionResult(mat, leak, meta, leakage_threshold)
    if res.degraded:
        warnings.warn(f"a*S result degraded: leakage {leak:.3g} above {leakage_threshold:g}", RuntimeWarning,
                      stacklevel=2)
    return res


def _points(points, n):
    if points is None:
        points = default_points(n)
    return np.asarray(points, dtype=complex).reshape(-1, n)


def convolve_op_op(S, T, points=None, leakage_threshold: float = DEFAULT_LEAKAGE_THRESHOLD,
                   skip_parity_for_diagonal: bool = True) -> ConvolutionResult:
    """``(S * T)(z) = Tr(S W_z (U T U) W_z^*)`` at each point.

    ``S`` and ``T`` may have different degrees; ``W_z`` is taken as the
    rectangular block between them.  Per point, ``meta["leakage"]`` estimates
    the truncation error as ``||S|| (sum_j ||T e_j|| l_j(z) + tail(T))`` with
    ``l_j(z) = 1 - ||P W_z e_j||^2``, clipped to ``[0, 1]``.
    """
    if S.truncation.n != T.truncation.n:
        raise TruncationMismatch("operators act on different dimensions")
    n = S.truncation.n
    pts = _points(points, n)
    if T.is_diagonal and skip_parity_for_diagonal:
        Tp = T.matrix  # U T U = T for diagonal T
    else:
        u = parity_vector(T.truncation)
        Tp = u[:, None] * T.matrix * u[None, :]
    Sm = S.matrix
    damp = np.exp(-np.pi * np.sum(np.abs(pts) ** 2, axis=1) / 2)
    W = damp[:, None, None] * displacement_poly(pts, np.conj(pts), S.truncation, T.truncation)
    V = np.einsum("pai,ij,pbj->pab", W, Tp, W.conj(), optimize=True)
    vals = np.einsum("ab,pba->p", Sm, V, optimize=True)
    # Displaced basis vectors of T lose mass ell_j(z) outside S's window; the
    # dropped part enters the trace linearly, hence the square root.
    col_mass = np.sum(np.abs(W) ** 2, axis=1)
    ell = np.clip(1.0 - col_mass, 0.0, 1.0)
    t_cols = np.sqrt(np.sum(np.abs(T.matrix) ** 2, axis=0))
    s_out = _outer_scale(S)
    tail_T = truncation_tail(T)
    est = 2 * s_out * (np.sqrt(ell) @ t_cols) + _norm2(Sm) * (tail_T if np.isfinite(tail_T) else 1.0)
    leak = np.clip(est, 0.0, 1.0)
    meta = {"op": "convolve_op_op", "S": S.provenance, "T": T.provenance,
            "K_S": S.truncation.K, "K_T": T.truncation.K, "leakage": leak.tolist()}
    sf = SampledFunction(pts, vals, meta)
    return ConvolutionResult(sf, float(leak.max()), {"points": len(pts)}, leakage_threshold)


def berezin(S, points=None) -> SampledFunction:
    """``B(S)(z) = <S k_z, k_z>`` from truncated kernel coefficients.

    ``meta["leakage"]`` carries ``1 - ||P k_z||^2`` per point.
    """
    n = S.truncation.n
    pts = _points(points, n)
    V = kernel_table(pts, S.truncation)
    if S.is_diagonal:
        vals = np.einsum("pk,k,pk->p", V.conj(), S.eigenvalues, V)
    else:
        vals = np.einsum("pk,km,pm->p", V.conj(), S.matrix, V)
    leak = np.clip(1.0 - np.sum(np.abs(V) ** 2, axis=1), 0.0, 1.0)
    return SampledFunction(pts, vals, {"op": "berezin", "operator": S.provenance, "leakage": leak.tolist()})


def heat_flow_operator(Ta, t: float, points=None, semigroup_degree: int | None = None) -> ConvolutionResult:
    """``B_t(a) = T_a * Phi_{t-1}`` for ``t > 1/2``.

    ``semigroup_degree`` builds ``Phi_{t-1}`` at a larger degree than ``T_a``
    to reduce its truncation tail.
    """
    if not t > 0.5:
        raise ValueError(f"heat flow through Phi_(t-1) needs t > 1/2 (trace class), got t={t}")
    trunc = Ta.truncation
    K = trunc.K if semigroup_degree is None else max(semigroup_degree, trunc.K)
    phi = heat_semigroup(t - 1, BasisTruncation(trunc.n, K))
    res = convolve_op_op(Ta, phi, points)
    sf = res.payload
    sf.meta.update({"t": t, "op": "heat_flow_operator"})
    return res


def sampled_interpolant(sf: SampledFunction, name: str = "interpolant") -> Symbol:
    """Bicubic interpolant of samples on a Cartesian grid (``n = 1``), zero outside."""
    if sf.n != 1:
        raise ValueError("interpolants are supported for n = 1 only")
    xs = np.unique(np.round(sf.points[:, 0].real, 12))
    ys = np.unique(np.round(sf.points[:, 0].imag, 12))
    if len(xs) * len(ys) != len(sf.points):
        raise ValueError("samples do not lie on a Cartesian grid")
    grid_vals = np.zeros((len(xs), len(ys)), dtype=complex)
    ix = np.searchsorted(xs, np.round(sf.points[:, 0].real, 12))
    iy = np.searchsorted(ys, np.round(sf.points[:, 0].imag, 12))
    grid_vals[ix, iy] = sf.values
    method = "cubic" if min(len(xs), len(ys)) >= 4 else "linear"
    re = RegularGridInterpolator((xs, ys), grid_vals.real, method=method, bounds_error=False, fill_value=0.0)
    im = RegularGridInterpolator((xs, ys), grid_vals.imag, method=method, bounds_error=False, fill_value=0.0)
    lo = (xs[0], ys[0])
    hi = (xs[-1], ys[-1])

    def func(z):
        z = np.asarray(z, dtype=complex)[..., 0]
        q = np.stack([z.real, z.imag], axis=-1)
        outside = (q[..., 0] < lo[0]) | (q[..., 0] > hi[0]) | (q[..., 1] < lo[1]) | (q[..., 1] > hi[1])
        if np.any(outside):
            warnings.warn("interpolant evaluated outside its sampling box; zero-extended", RuntimeWarning,
                          stacklevel=2)
        return re(q) + 1j * im(q)

    return Symbol(func, n=1, kind="generic", bounded_hint=float(np.max(np.abs(sf.values))), name=name,
                  params={"interpolated": True})


def reconstruct_toeplitz(Bta, t: float, out: BasisTruncation, grid: QuadratureGrid | None = None,
                         semigroup_degree: int | None = None,
                         leakage_threshold: float = DEFAULT_LEAKAGE_THRESHOLD) -> ConvolutionResult:
    """``T_a = B_t(a) * Phi_{-t}`` for ``0 < t < 1/2``: the bounded extension of ``T_a``.

    ``Bta`` is a :class:`Symbol` or a :class:`SampledFunction` on a Cartesian
    grid (interpolated).  ``Phi_{-t}`` has eigenvalue ratio ``t/(1-t)``; by
    default its degree is chosen so the dropped tail is below ``1e-12``.
    """
    if not 0 < t < 0.5:
        raise ValueError(f"reconstruction needs 0 < t < 1/2, got t={t}")
    if isinstance(Bta, SampledFunction):
        Bta = sampled_interpolant(Bta, name=f"B_{t:g}(samples)")
    if semigroup_degree is None:
        rho = t / (1 - t)
        semigroup_degree = int(np.ceil(np.log(1e-12 * (1 - rho)) / np.log(rho)))
        cap = 80 if grid is None else grid.Q - 1 - out.K
        semigroup_degree = max(out.K, min(semigroup_degree, cap))
    phi = heat_semigroup(-t, BasisTruncation(out.n, semigroup_degree))
    res = convolve_fn_op(Bta, phi, grid=grid, out=out, leakage_threshold=leakage_threshold)
    res.payload.provenance.update({"op": "reconstruct_toeplitz", "t": t})
    return res


__all__ = [
    "ConvolutionResult",
    "convolve_fn_op",
    "convolve_op_op",
    "berezin",
    "heat_flow_operator",
    "reconstruct_toeplitz",
    "sampled_interpolant",
    "truncation_tail",
]

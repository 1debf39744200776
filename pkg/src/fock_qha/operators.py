"""Operators in the truncated monomial basis.

Toeplitz operators (quadrature, radial and Gaussian closed-form paths), the
operator heat semigroup ``Phi_t`` including ``-1/2 < t < 0``, Weyl
displacements ``W_z``, QHA translations ``W_z S W_z^*`` and the basic
projections ``E_m``.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import roots_genlaguerre

from .fock_core import BasisTruncation, monomial_table, parity_vector
from .quadrature import QuadratureError, QuadratureGrid, build_grid, scaled_coordinates, weighted_array_sum
from .symbols import AdmissibilityError, Symbol, is_admissible

OPERATOR_SCHEMA = "fock-qha-operator/1"


class TruncationMismatch(ValueError):
    pass


def _same_truncation(a: BasisTruncation, b: BasisTruncation) -> bool:
    return a.n == b.n and a.K == b.K


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Dense ``D x D`` matrix, ``entries[k, m] = <S e_m, e_k>``."""

    entries: np.ndarray
    truncation: BasisTruncation
    provenance: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        D = self.truncation.D
        if self.entries.shape != (D, D):
            raise ValueError(f"entries have shape {self.entries.shape}, expected {(D, D)}")
        if not self.provenance:
            raise ValueError("provenance must be populated")

    @property
    def matrix(self) -> np.ndarray:
        return self.entries

    is_diagonal = False

    def save(self, path, fmt: str = "binary") -> Path:
        """Write ``<path>.json`` plus ``<path>.bin`` (little-endian complex128, row-major) or ``<path>.csv``."""
        path = Path(path)
        if fmt == "binary":
            payload = path.with_suffix(".bin")
            payload.write_bytes(np.ascontiguousarray(self.entries, dtype="<c16").tobytes(order="C"))
        elif fmt == "csv":
            payload = path.with_suffix(".csv")
            lines = ["row,col,re,im"]
            for (k, m), v in np.ndenumerate(self.entries):
                lines.append(f"{k},{m},{float(v.real)!r},{float(v.imag)!r}")
            payload.write_text("\n".join(lines) + "\n")
        else:
            raise ValueError(f"unknown payload format {fmt!r}")
        envelope = {
            "schema": OPERATOR_SCHEMA,
            "truncation": self.truncation.to_dict(),
            "provenance": self.provenance,
            "payload": {
                "file": payload.name,
                "format": fmt,
                "dtype": "complex128",
                "byteorder": "little",
                "order": "row-major",
                "shape": list(self.entries.shape),
            },
        }
        out = path.with_suffix(".json")
        out.write_text(json.dumps(envelope, sort_keys=True, indent=1, default=_jsonable))
        return out

    @classmethod
    def load(cls, path) -> "OperatorMatrix":
        path = Path(path).with_suffix(".json")
        env = json.loads(path.read_text())
        if env.get("schema") != OPERATOR_SCHEMA:
            raise ValueError(f"unexpected schema {env.get('schema')!r}")
        trunc = BasisTruncation(env["truncation"]["n"], env["truncation"]["K"])
        meta = env["payload"]
        src = path.parent / meta["file"]
        shape = tuple(meta["shape"])
        if meta["format"] == "binary":
            entries = np.frombuffer(src.read_bytes(), dtype="<c16").reshape(shape).astype(complex)
        else:
            entries = np.zeros(shape, dtype=complex)
            for line in src.read_text().splitlines()[1:]:
                k, m, re, im = line.split(",")
                entries[int(k), int(m)] = complex(float(re), float(im))
        return cls(entries, trunc, env["provenance"])


@dataclass(frozen=True, eq=False)
class DiagonalOperator:
    """Operator diagonal in the monomial basis; the fast path for radial operators."""

    eigenvalues: np.ndarray
    truncation: BasisTruncation
    provenance: dict = field(default_factory=dict)
    radial: bool = False

    def __post_init__(self):
        if len(self.eigenvalues) != self.truncation.D:
            raise ValueError("eigenvalue vector length does not match the truncation")
        if self.radial:
            deg = self.truncation.degrees
            for d in np.unique(deg):
                block = self.eigenvalues[deg == d]
                if not np.allclose(block, block[0], rtol=1e-9, atol=1e-300):
                    raise ValueError(f"radial operator has eigenvalues varying within degree {d}")

    is_diagonal = True

    @property
    def matrix(self) -> np.ndarray:
        return np.diag(self.eigenvalues.astype(complex))

    def to_matrix(self) -> OperatorMatrix:
        return OperatorMatrix(self.matrix, self.truncation, dict(self.provenance, diagonal=True))


def as_matrix(S) -> np.ndarray:
    return S.matrix


def _jsonable(o):
    if isinstance(o, complex):
        return [o.real, o.imag]
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    return str(o)


# ---------------------------------------------------------------- Toeplitz


def toeplitz_quadrature(a: Symbol, trunc: BasisTruncation, grid: QuadratureGrid | None = None,
                        chunk: int = 256) -> OperatorMatrix:
    """``entries[k, m] = int a e_m conj(e_k) dlambda`` by tensor Gauss-Hermite quadrature.

    Gaussian symbols are integrated against the matched weight
    ``exp(-pi (1 + 1/xi) |z|^2)``, which makes the rule exact.  Other symbols
    use the standard grid.  Real-valued symbols give a Hermitian matrix; the
    asymmetry before symmetrization is stored in ``diagnostics``.
    """
    if grid is None:
        grid = build_grid(trunc.n, max(trunc.K + 1, 8) if trunc.n > 1 else max(trunc.K + 8, 40))
    if grid.n != trunc.n:
        raise ValueError("grid and truncation dimensions differ")
    if grid.Q <= trunc.K:
        raise QuadratureError(f"Q={grid.Q} must exceed K={trunc.K} for exact basis integrals")
    D = trunc.D
    if a.is_gaussian:
        c = 1 + 1 / complex(a.xi)
        z, zb, jac = scaled_coordinates(grid, c)
        pre = a.gaussian_prefactor() * jac
        Ez = monomial_table(z, trunc)
        Ezb = monomial_table(zb, trunc)
        entries = pre * weighted_array_sum(
            grid.weights, lambda sl: Ezb[sl][:, :, None] * Ez[sl][:, None, :], grid.size, chunk)
        route = "gaussian_matched_weight"
    else:
        vals = a(grid.nodes)
        if not np.all(np.isfinite(vals)):
            bad = int(np.flatnonzero(~np.isfinite(vals))[0])
            raise QuadratureError(f"non-finite symbol value at node {bad}: z={grid.nodes[bad]}")
        E = monomial_table(grid.nodes, trunc)
        Ec = np.conj(E)
        entries = weighted_array_sum(
            grid.weights, lambda sl: vals[sl][:, None, None] * Ec[sl][:, :, None] * E[sl][:, None, :],
            grid.size, chunk)
        route = "standard_grid"
    diagnostics = {}
    real = a.real_valued if a.is_gaussian else (a.real_valued or bool(np.all(np.asarray(a(grid.nodes)).imag == 0)))
    if real:
        asym = float(np.max(np.abs(entries - entries.conj().T))) if D else 0.0
        diagnostics["asymmetry"] = asym
        entries = 0.5 * (entries + entries.conj().T)
    prov = {"op": "toeplitz_quadrature", "symbol": a.describe(), "Q": grid.Q, "route": route}
    return OperatorMatrix(entries, trunc, prov, diagnostics)


def toeplitz_radial(profile, trunc: BasisTruncation, nodes: int = 160) -> DiagonalOperator:
    """Toeplitz operator of the radial symbol ``a(z) = profile(|z|)``.

    For ``n = 1`` the eigenvalue on ``e_m`` is
    ``(1/m!) int_0^inf profile(sqrt(u/pi)) u^m e^{-u} du`` (``u = pi r^2``),
    computed with a generalized Gauss-Laguerre rule of weight ``u^m e^{-u}``.
    For ``n > 1`` the matrix goes through :func:`toeplitz_quadrature`.
    """
    if trunc.n != 1:
        sym = Symbol(lambda z: profile(np.sqrt(np.sum(np.abs(z) ** 2, axis=-1))), n=trunc.n,
                     kind="radial", profile=profile, name="radial_profile")
        mat = toeplitz_quadrature(sym, trunc)
        return DiagonalOperator(np.diag(mat.entries).copy(), trunc,
                                {"op": "toeplitz_radial", "route": "quadrature", "Q": mat.provenance["Q"]},
                                radial=True)
    eig = np.empty(trunc.D, dtype=complex)
    for m in range(trunc.K + 1):
        u, w = roots_genlaguerre(nodes, m)
        vals = np.asarray(profile(np.sqrt(u / np.pi)), dtype=complex)
        if not np.all(np.isfinite(vals)):
            raise QuadratureError(f"non-finite radial profile in the eigenvalue integral for m={m}")
        eig[m] = np.sum(w * vals) / np.sum(w)
    return DiagonalOperator(eig, trunc, {"op": "toeplitz_radial", "route": "gauss_laguerre", "nodes": nodes},
                            radial=True)


def gaussian_toeplitz(xi: complex, trunc: BasisTruncation) -> DiagonalOperator:
    """Closed-form ``T_{phi_xi}``: eigenvalue ``xi^{-n} (1 + 1/xi)^{-(|m| + n)}``.

    Both exponents are integers, so no branch choice enters for complex ``xi``.
    """
    xi = complex(xi)
    if not is_admissible(xi):
        raise AdmissibilityError(f"xi={xi} violates Re(xi)/|xi|^2 > -1/2")
    n = trunc.n
    base = 1 + 1 / xi
    eig = np.array([xi ** (-n) * base ** (-(int(d) + n)) for d in trunc.degrees], dtype=complex)
    return DiagonalOperator(eig, trunc, {"op": "gaussian_toeplitz", "xi": [xi.real, xi.imag]}, radial=True)


# ----------------------------------------------------------- heat semigroup

SEMIGROUP_EDGE = 1e-6
SEMIGROUP_WARN = -0.45


def heat_semigroup(t: float, trunc: BasisTruncation) -> DiagonalOperator:
    """``Phi_t``: eigenvalue ``t^|m| / (1 + t)^(n + |m|)`` for ``t > -1/2``.

    ``Phi_0`` is the rank-one projection onto ``e_0`` (``0^0 = 1``).
    """
    t = float(t)
    if t <= -0.5:
        raise ValueError(
            f"Phi_t needs t > -1/2, got t={t}; Phi_(-1/2) is no longer trace-class"
        )
    if t <= -0.5 + SEMIGROUP_EDGE:
        raise ValueError(f"t={t} is within {SEMIGROUP_EDGE} of -1/2; trace norm (1+2t)^(-n) is unusable")
    if t < SEMIGROUP_WARN:
        warnings.warn(f"t={t} is close to -1/2: trace norm {(1 + 2 * t) ** -trunc.n:.3g}, poor conditioning",
                      RuntimeWarning, stacklevel=2)
    ratio = t / (1 + t)
    eig = ratio ** trunc.degrees.astype(float) / (1 + t) ** trunc.n
    return DiagonalOperator(eig.astype(complex), trunc, {"op": "heat_semigroup", "t": t}, radial=True)


def semigroup_trace_norm(t: float, n: int = 1) -> float:
    """Closed form: 1 for ``t >= 0``, ``(1 + 2t)^(-n)`` for ``-1/2 < t < 0``."""
    if t <= -0.5:
        return float("inf")
    return 1.0 if t >= 0 else (1 + 2 * t) ** (-n)


def basic_projection(m, trunc: BasisTruncation) -> DiagonalOperator:
    """``E_m f = <f, e_m> e_m``."""
    m = tuple(int(v) for v in m)
    if sum(m) > trunc.K:
        raise ValueError(f"|m|={sum(m)} exceeds the truncation degree K={trunc.K}")
    eig = np.zeros(trunc.D, dtype=complex)
    eig[trunc.position(m)] = 1.0
    return DiagonalOperator(eig, trunc, {"op": "basic_projection", "m": list(m)})


# ------------------------------------------------------------- displacement


def _laguerre_table(x: np.ndarray, nmax: int, amax: int) -> np.ndarray:
    """``L_n^(alpha)(x)`` for ``alpha <= amax``, ``n <= nmax``; shape ``(amax+1, nmax+1) + x.shape``."""
    alpha = np.arange(amax + 1, dtype=float).reshape((-1,) + (1,) * x.ndim)
    out = np.empty((amax + 1, nmax + 1) + x.shape, dtype=complex)
    out[:, 0] = 1.0
    if nmax >= 1:
        out[:, 1] = 1.0 + alpha - x
    for k in range(1, nmax):
        out[:, k + 1] = ((2 * k + 1 + alpha - x) * out[:, k] - (k + alpha) * out[:, k - 1]) / (k + 1)
    return out


def _axis_blocks(z: np.ndarray, zb: np.ndarray, Kr: int, Kc: int) -> np.ndarray:
    """Polynomial part of ``<W_z e_m, e_k>`` in one variable; shape ``(N, Kr+1, Kc+1)``.

    For ``k >= m`` it is ``sqrt(m!/k!) (sqrt(pi) zb)^(k-m) L_m^(k-m)(pi z zb)``;
    for ``k < m`` it is ``sqrt(k!/m!) (-sqrt(pi) z)^(m-k) L_k^(m-k)(pi z zb)``.
    The full entry is this times ``exp(-pi z zb / 2)``.
    """
    N = z.shape[0]
    lo_max = min(Kr, Kc)
    amax = max(Kr, Kc)
    x = np.pi * z * zb
    lag = _laguerre_table(x, lo_max, amax)  # (A, L, N)
    # pref[s][low, alpha] = prod_{i=low+1}^{low+alpha} s / sqrt(i)
    prefs = []
    for s in (np.sqrt(np.pi) * zb, -np.sqrt(np.pi) * z):
        g = np.empty((lo_max + 1, amax + 1, N), dtype=complex)
        g[:, 0] = 1.0
        low = np.arange(lo_max + 1, dtype=float)[:, None]
        for a in range(1, amax + 1):
            g[:, a] = g[:, a - 1] * s[None, :] / np.sqrt(low + a)
        prefs.append(g)
    k = np.arange(Kr + 1)[:, None]
    m = np.arange(Kc + 1)[None, :]
    low = np.minimum(k, m)
    alpha = np.abs(k - m)
    lower = (k >= m)[..., None]
    out = np.where(lower, prefs[0][low, alpha], prefs[1][low, alpha]) * lag[alpha, low]
    return np.moveaxis(out, -1, 0)


def displacement_poly(z, zb, rows: BasisTruncation, cols: BasisTruncation | None = None) -> np.ndarray:
    """``P`` with ``<W_z e_m, e_k> = exp(-pi z.zb / 2) P[k, m]``; shape ``(N, D_rows, D_cols)``.

    ``z`` and ``zb`` have shape ``(N, n)``.  For a real point ``zb = conj(z)``;
    independent ``zb`` gives the polynomial continuation used with
    complex-scaled quadrature nodes.  Because the coefficients are real,
    ``conj(P(z, conj z)) = P(conj z, z)``.
    """
    cols = rows if cols is None else cols
    z = np.asarray(z, dtype=complex).reshape(-1, rows.n)
    zb = np.asarray(zb, dtype=complex).reshape(-1, rows.n)
    ir, ic = rows.index_array, cols.index_array
    out = None
    for j in range(rows.n):
        blk = _axis_blocks(z[:, j], zb[:, j], rows.K, cols.K)
        part = blk[:, ir[:, j]][:, :, ic[:, j]]
        out = part if out is None else out * part
    return out


def displacement_matrix(z, trunc: BasisTruncation) -> OperatorMatrix:
    """``entries[k, m] = <W_z e_m, e_k>`` from the Laguerre closed form.

    ``diagnostics["column_leakage"]`` holds ``1 - ||P_D W_z e_m||^2`` per column;
    it is computed from the closed form of the column norm over all rows,
    which is one, so it equals the mass pushed outside the truncation.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    damp = np.exp(-np.pi * np.sum(np.abs(z) ** 2) / 2)
    P = displacement_poly(z[None, :], np.conj(z)[None, :], trunc)[0]
    W = damp * P
    leak = np.clip(1.0 - np.sum(np.abs(W) ** 2, axis=0), 0.0, 1.0)
    prov = {"op": "displacement", "z": [[c.real, c.imag] for c in z], "route": "laguerre"}
    return OperatorMatrix(W, trunc, prov, {"column_leakage": leak, "max_leakage": float(leak.max())})


def displacement_oracle(z, trunc: BasisTruncation, grid: QuadratureGrid | None = None) -> np.ndarray:
    """Brute-force ``<W_z e_m, e_k> = int k_z(w) e_m(w - z) conj(e_k(w)) dlambda(w)``."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if grid is None:
        grid = build_grid(trunc.n, 80 if trunc.n == 1 else 20)
    w = grid.nodes
    kz = np.exp(np.pi * (w @ np.conj(z)) - np.pi * np.sum(np.abs(z) ** 2) / 2)
    shifted = monomial_table(w - z[None, :], trunc)
    Ec = np.conj(monomial_table(w, trunc))
    return weighted_array_sum(
        grid.weights, lambda sl: kz[sl][:, None, None] * Ec[sl][:, :, None] * shifted[sl][:, None, :],
        grid.size)


def translate_operator(z, S, trunc: BasisTruncation | None = None) -> OperatorMatrix:
    """``alpha_z(S) = W_z S W_z^*`` in the truncated space.

    ``diagnostics["leakage"]`` is ``max_m (1 - ||P_D W_z e_m||^2)``.
    """
    if trunc is not None and not _same_truncation(trunc, S.truncation):
        raise TruncationMismatch(f"operator truncation K={S.truncation.K} differs from K={trunc.K}")
    trunc = S.truncation
    W = displacement_matrix(z, trunc)
    M = W.entries @ S.matrix @ W.entries.conj().T
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    prov = {"op": "translate", "z": [[c.real, c.imag] for c in z], "base": S.provenance}
    return OperatorMatrix(M, trunc, prov, {"leakage": W.diagnostics["max_leakage"]})


def parity_conjugate(S) -> np.ndarray:
    """Matrix of ``U S U`` with ``U e_m = (-1)^|m| e_m``."""
    u = parity_vector(S.truncation)
    return u[:, None] * S.matrix * u[None, :]


__all__ = [
    "OperatorMatrix",
    "DiagonalOperator",
    "TruncationMismatch",
    "as_matrix",
    "toeplitz_quadrature",
    "toeplitz_radial",
    "gaussian_toeplitz",
    "heat_semigroup",
    "semigroup_trace_norm",
    "basic_projection",
    "displacement_poly",
    "displacement_matrix",
    "displacement_oracle",
    "translate_operator",
    "parity_conjugate",
]

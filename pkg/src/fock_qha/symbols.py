"""Symbols on C^n, heat kernels and function-function convolution.

A :class:`Symbol` is a vectorized callable plus structural metadata.  The
Gaussian kind ``phi_xi(z) = xi^{-n} exp(-pi |z|^2 / xi)`` is tracked
explicitly because every closed form in the toolkit is written in terms of it
and because its Gaussian factor lets quadrature run with a matched weight.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .quadrature import QuadratureError, QuadratureGrid, build_grid, weighted_array_sum


class AdmissibilityError(ValueError):
    """A Gaussian parameter outside ``Re(xi)/|xi|^2 > -1/2``."""


def is_admissible(xi: complex) -> bool:
    xi = complex(xi)
    return xi != 0 and xi.real / abs(xi) ** 2 > -0.5


@dataclass(frozen=True, eq=False)
class Symbol:
    """A function ``C^n -> C`` evaluated on arrays of points of shape ``(..., n)``.

    ``kind`` is one of ``"gaussian"``, ``"radial"``, ``"generic"``.  For the
    Gaussian kind ``xi`` holds the parameter; for the radial kind ``profile``
    maps ``|z|`` to the value.  ``bounded_hint`` is a known sup-norm, if any.
    """

    func: Callable[[np.ndarray], np.ndarray]
    n: int = 1
    kind: str = "generic"
    xi: complex | None = None
    profile: Callable[[np.ndarray], np.ndarray] | None = None
    bounded_hint: float | None = None
    real_valued: bool = False
    name: str = "symbol"
    params: dict = field(default_factory=dict)

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        if z.shape[-1] != self.n:
            raise ValueError(f"symbol {self.name} expects points with trailing dimension {self.n}")
        return np.asarray(self.func(z), dtype=complex)

    @property
    def is_gaussian(self) -> bool:
        return self.kind == "gaussian"

    def gaussian_prefactor(self) -> complex:
        """``xi^{-n}``; the Gaussian symbol is this constant times ``exp(-pi|z|^2/xi)``."""
        return complex(self.xi) ** (-self.n)

    def describe(self) -> dict:
        out = {"name": self.name, "kind": self.kind, "n": self.n}
        if self.xi is not None:
            out["xi"] = [complex(self.xi).real, complex(self.xi).imag]
        out.update(self.params)
        return out


def _sqnorm(z):
    return np.sum(np.abs(z) ** 2, axis=-1)


def heat_kernel(t, n: int = 1) -> Symbol:
    """``phi_t(z) = t^{-n} exp(-pi |z|^2 / t)``; complex ``t`` gives the generalized Gaussian.

    Raises :class:`AdmissibilityError` unless ``Re(t)/|t|^2 > -1/2``.
    """
    xi = complex(t)
    if not is_admissible(xi):
        raise AdmissibilityError(
            f"Gaussian parameter xi={xi} violates Re(xi)/|xi|^2 > -1/2; "
            "its translates are not square-integrable against the Gaussian measure"
        )
    real_t = xi.imag == 0 and xi.real > 0
    if real_t:
        tt = xi.real
        func = lambda z: tt ** (-n) * np.exp(-np.pi * _sqnorm(z) / tt)  # noqa: E731
        profile = lambda r: tt ** (-n) * np.exp(-np.pi * np.asarray(r) ** 2 / tt)  # noqa: E731
    else:
        func = lambda z: xi ** (-n) * np.exp(-np.pi * _sqnorm(z) / xi)  # noqa: E731
        profile = lambda r: xi ** (-n) * np.exp(-np.pi * np.asarray(r) ** 2 / xi)  # noqa: E731
    inv = 1 / xi
    bounded = abs(xi) ** (-n) if inv.real >= 0 else None
    label = f"phi_{xi.real:g}" if xi.imag == 0 else f"phi_({xi.real:g}{xi.imag:+g}i)"
    return Symbol(func, n=n, kind="gaussian", xi=xi, profile=profile, bounded_hint=bounded,
                  real_valued=real_t or xi.imag == 0, name=label)


gaussian_symbol = heat_kernel


def constant_symbol(c: complex = 1.0, n: int = 1) -> Symbol:
    c = complex(c)
    return Symbol(lambda z: np.full(z.shape[:-1], c, dtype=complex), n=n, kind="radial",
                  profile=lambda r: np.full(np.shape(r), c, dtype=complex),
                  bounded_hint=abs(c), real_valued=c.imag == 0, name=f"const_{c.real:g}",
                  params={"c": [c.real, c.imag]})


def radial_polynomial(d: int = 1, n: int = 1) -> Symbol:
    """``(pi |z|^2)^d``; unbounded for ``d >= 1``."""
    return Symbol(lambda z: (np.pi * _sqnorm(z)) ** d + 0j, n=n, kind="radial",
                  profile=lambda r: (np.pi * np.asarray(r) ** 2) ** d + 0j,
                  real_valued=True, name=f"radial_poly_{d}", params={"d": d})


def oscillatory_symbol(theta: float = 2 * np.pi, n: int = 1) -> Symbol:
    """``exp(i theta Re z_1)``, bounded with sup-norm one."""
    return Symbol(lambda z: np.exp(1j * theta * z[..., 0].real), n=n, kind="generic",
                  bounded_hint=1.0, name=f"osc_{theta:.6g}", params={"theta": theta})


def smooth_bump(radius: float = 1.0, width: float = 0.5, n: int = 1) -> Symbol:
    """Radial logistic bump ``1 / (1 + exp((|z|^2 - radius^2) / (2 radius width)))``.

    Written in ``|z|^2`` so it is smooth at the origin (a logistic in ``|z|``
    has a cone point there, which stalls Gauss quadrature); the scaling keeps
    the edge slope of ``1 / (1 + exp((|z| - radius) / width))``.  Vanishes at
    infinity.
    """

    def profile(r):
        r2 = np.asarray(r) ** 2
        return 1.0 / (1.0 + np.exp((r2 - radius**2) / (2 * radius * width))) + 0j

    return Symbol(lambda z: profile(np.sqrt(_sqnorm(z))), n=n, kind="radial", profile=profile,
                  bounded_hint=1.0, real_valued=True, name=f"bump_{radius:g}_{width:g}",
                  params={"radius": radius, "width": width})


def default_points(n: int = 1, extent: float = 2.0) -> np.ndarray:
    """Cartesian evaluation grid over ``[-extent, extent]^2`` per complex coordinate.

    11 x 11 for ``n = 1`` and 5^4 for ``n = 2``.
    """
    m = 11 if n == 1 else 5
    ax = np.linspace(-extent, extent, m)
    mesh = np.meshgrid(*([ax] * (2 * n)), indexing="ij")
    coords = np.stack([a.ravel() for a in mesh], axis=1)
    return coords[:, 0::2] + 1j * coords[:, 1::2]


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Values of a function at explicit points, with the parameters that produced them."""

    points: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.points) != len(self.values):
            raise ValueError("points and values must have equal length")

    @property
    def n(self) -> int:
        return self.points.shape[-1]

    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))

    def to_csv(self) -> str:
        cols = []
        for j in range(self.n):
            cols += [f"re_z{j + 1}", f"im_z{j + 1}"]
        lines = [",".join(cols + ["re_value", "im_value"])]
        for p, v in zip(self.points, self.values):
            row = []
            for c in p:
                row += [repr(float(c.real)), repr(float(c.imag))]
            row += [repr(float(v.real)), repr(float(v.imag))]
            lines.append(",".join(row))
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        payload = {
            "meta": self.meta,
            "points": [[[float(c.real), float(c.imag)] for c in p] for p in self.points],
            "values": [[float(v.real), float(v.imag)] for v in self.values],
        }
        return json.dumps(payload, sort_keys=True, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "SampledFunction":
        d = json.loads(text)
        pts = np.array([[complex(*c) for c in p] for p in d["points"]])
        vals = np.array([complex(*v) for v in d["values"]])
        return cls(pts, vals, d["meta"])


def _as_points(points, n):
    return np.asarray(points, dtype=complex).reshape(-1, n)


def _gaussian_sum(xi, eta):
    s = complex(xi) + complex(eta)
    return s.real if s.imag == 0 else s


def convolve_symbols(a: Symbol, b: Symbol, points, grid: QuadratureGrid | None = None,
                     closed_form: bool = True) -> SampledFunction:
    """``(a * b)(z) = int a(z - w) b(w) dm(w)`` at each point.

    Two Gaussians combine in closed form, ``phi_s * phi_t = phi_{s+t}``,
    unless ``closed_form=False``.  Otherwise one factor must be a Gaussian
    with real positive parameter ``t``; the substitution ``w = sqrt(t) v``
    turns the integral into one against the standard Gaussian measure.
    """
    if a.n != b.n:
        raise ValueError("symbols live on different dimensions")
    n = a.n
    pts = _as_points(points, n)
    if closed_form and a.is_gaussian and b.is_gaussian:
        s = _gaussian_sum(a.xi, b.xi)
        vals = complex(s) ** (-n) * np.exp(-np.pi * _sqnorm(pts) / complex(s))
        return SampledFunction(pts, vals, {"route": "closed_form", "xi": [complex(s).real, complex(s).imag]})

    def real_width(sym):
        if sym.is_gaussian and complex(sym.xi).imag == 0 and complex(sym.xi).real > 0:
            return complex(sym.xi).real
        return None

    ta, tb = real_width(a), real_width(b)
    if tb is not None and (ta is None or tb <= ta):
        mollifier, other, t, sign = b, a, tb, -1.0
    elif ta is not None:
        # u = z - w puts the Gaussian on the integration variable; the node set
        # is symmetric under v -> -v, so b(z + sqrt(t) v) sums the same terms
        mollifier, other, t, sign = a, b, ta, 1.0
    else:
        raise QuadratureError(
            "convolve_symbols needs a Gaussian factor with real positive parameter for quadrature; "
            f"got {a.name} and {b.name}"
        )
    if grid is None:
        grid = build_grid(n)
    shift = np.sqrt(t) * grid.nodes
    vals = weighted_array_sum(
        grid.weights,
        lambda sl: other(pts[None, :, :] + sign * shift[sl][:, None, :]),
        grid.size,
    )
    meta = {"route": "quadrature", "t": t, "Q": grid.Q, "mollifier": mollifier.name}
    return SampledFunction(pts, vals, meta)


def heat_transform(a: Symbol, t: float, points=None, grid: QuadratureGrid | None = None,
                   closed_form: bool = True) -> SampledFunction:
    """``B_t(a) = a * phi_t`` sampled at ``points`` (default evaluation grid)."""
    if not t > 0:
        raise ValueError(f"heat transform requires t > 0, got {t}")
    if points is None:
        points = default_points(a.n)
    res = convolve_symbols(a, heat_kernel(t, a.n), points, grid=grid, closed_form=closed_form)
    meta = dict(res.meta, t=t, symbol=a.name)
    return SampledFunction(res.points, res.values, meta)


def heat_transform_symbol(a: Symbol, t: float, grid: QuadratureGrid | None = None) -> Symbol:
    """``B_t(a)`` as a :class:`Symbol` evaluated lazily by quadrature.

    Gaussians map to Gaussians (``xi -> xi + t``); anything else is evaluated
    pointwise by quadrature on each call.
    """
    if a.is_gaussian:
        return heat_kernel(_gaussian_sum(a.xi, t), a.n)
    if grid is None:
        grid = build_grid(a.n)

    def func(z):
        z = np.asarray(z, dtype=complex)
        flat = z.reshape(-1, a.n)
        vals = heat_transform(a, t, flat, grid=grid).values
        return vals.reshape(z.shape[:-1])

    hint = a.bounded_hint
    return Symbol(func, n=a.n, kind="generic", bounded_hint=hint, real_valued=a.real_valued,
                  name=f"B_{t:g}({a.name})", params={"t": t, "base": a.name})


def check_A2lambda(a: Symbol, probes, grid: QuadratureGrid | None = None) -> list[float]:
    """Quadrature value of ``int |a(w)|^2 |K_z(w)|^2 dlambda(w)`` at each probe ``z``.

    Uses ``|K_z(w)|^2 exp(-pi|w|^2) = exp(pi|z|^2) exp(-pi|w - z|^2)`` so the
    integrand against the standard grid is ``exp(pi|z|^2) |a(v + z)|^2``.
    A value that keeps growing under refinement of ``Q`` signals that ``a``
    is not in the symbol class; finiteness at a single ``Q`` proves nothing.
    """
    if grid is None:
        grid = build_grid(a.n)
    pts = _as_points(probes, a.n)
    out = []
    for z in pts:
        vals = np.abs(a(grid.nodes + z[None, :])) ** 2
        if not np.all(np.isfinite(vals)):
            bad = int(np.flatnonzero(~np.isfinite(vals))[0])
            warnings.warn(f"non-finite |a|^2 at node {bad} for probe {z}")
            out.append(float("inf"))
            continue
        total = math.fsum((grid.weights * vals).tolist())
        out.append(float(np.exp(np.pi * np.sum(np.abs(z) ** 2)) * total))
    return out


def lp_norm(f: Callable[[np.ndarray], np.ndarray], p: float, n: int = 1, scale: float = 1.0,
            grid: QuadratureGrid | None = None) -> float:
    """``(int |f|^p dm)^{1/p}`` for ``f`` with Gaussian decay of width ``scale``.

    The substitution ``z = sqrt(scale / p) v`` matches the Gaussian weight to
    ``|f|^p`` when ``|f(z)| ~ exp(-pi |z|^2 / scale)``; the residual factor
    ``|f|^p exp(pi |v|^2)`` is then smooth and bounded.  ``p = inf`` returns
    the grid supremum over the scaled nodes.
    """
    if grid is None:
        grid = build_grid(n)
    if np.isinf(p):
        return float(np.max(np.abs(f(grid.nodes * np.sqrt(scale)))))
    sigma2 = scale / p
    z = grid.nodes * np.sqrt(sigma2)
    vals = np.abs(f(z)) ** p * np.exp(np.pi * _sqnorm(grid.nodes)) * sigma2**n
    total = math.fsum((grid.weights * vals).tolist())
    return float(total ** (1.0 / p))


def gaussian_lp_norm(xi: complex, p: float, n: int = 1) -> float:
    """Closed-form ``||phi_xi||_p`` over Lebesgue measure; real ``s`` gives ``s^{n(1-p)/p} p^{-n/p}``."""
    xi = complex(xi)
    decay = (1 / xi).real
    if np.isinf(p):
        return abs(xi) ** (-n) if decay >= 0 else float("inf")
    if decay <= 0:
        return float("inf")
    return float((abs(xi) ** (-n * p) / (p * decay) ** n) ** (1.0 / p))


__all__ = [
    "Symbol",
    "SampledFunction",
    "AdmissibilityError",
    "is_admissible",
    "heat_kernel",
    "gaussian_symbol",
    "constant_symbol",
    "radial_polynomial",
    "oscillatory_symbol",
    "smooth_bump",
    "default_points",
    "convolve_symbols",
    "heat_transform",
    "heat_transform_symbol",
    "check_A2lambda",
    "lp_norm",
    "gaussian_lp_norm",
]

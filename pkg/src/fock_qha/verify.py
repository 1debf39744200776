"""Verification harness for the QHA identities and inequalities.

Every check returns a :class:`VerificationReport` whose ``params`` record is
enough to rerun it exactly.  Reports serialize deterministically (sorted
keys, ``repr``-exact floats), so identical configurations give
byte-identical files.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .fock_core import BasisTruncation
from .operators import (
    DiagonalOperator,
    displacement_matrix,
    displacement_oracle,
    gaussian_toeplitz,
    heat_semigroup,
    semigroup_trace_norm,
    toeplitz_quadrature,
    toeplitz_radial,
)
from .qha_conv import berezin, convolve_fn_op, convolve_op_op, heat_flow_operator, reconstruct_toeplitz
from .quadrature import build_grid
from .spectral import convergence_table, spectral_summary
from .symbols import (
    Symbol,
    check_A2lambda,
    constant_symbol,
    default_points,
    gaussian_lp_norm,
    heat_kernel,
    heat_transform,
    heat_transform_symbol,
    is_admissible,
    lp_norm,
    oscillatory_symbol,
    radial_polynomial,
    smooth_bump,
)

REPORT_SCHEMA = "fock-qha-report/1"
CALIBRATION_TOL = 1e-7


class UnconvergedError(RuntimeError):
    """A truncation-dependent norm did not settle across the degrees tried."""


@dataclass(frozen=True)
class RunConfig:
    """Parameters shared by every check.

    ``K`` and ``Q`` drive Toeplitz matrices and convolutions; ``spectral_K``
    is used for diagonal closed-form operators, where a large degree is
    cheap; ``recon_K`` is the output degree of reconstructions.
    """

    n: int = 1
    K: int = 32
    Q: int = 64
    tol: float = 1e-7
    extent: float = 2.0
    spectral_K: int = 200
    recon_K: int = 20
    recon_Q: int = 80
    semigroup_K: int = 80
    leakage_threshold: float = 1e-4

    def to_dict(self) -> dict:
        return asdict(self)

    def points(self) -> np.ndarray:
        return default_points(self.n, self.extent)

    def grid(self, Q: int | None = None):
        return build_grid(self.n, Q or self.Q)


# ----------------------------------------------------------------- reports


def _plain(v):
    if isinstance(v, (complex, np.complexfloating)):
        v = complex(v)
        return v.real if v.imag == 0 else [v.real, v.imag]
    if isinstance(v, np.generic):
        return v.item()
    if isinstance(v, np.ndarray):
        return [_plain(x) for x in v.tolist()]
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    return v


@dataclass
class VerificationReport:
    check_id: str
    params: dict
    lhs: object
    rhs: object
    residual: float
    passed: bool
    notes: dict = field(default_factory=dict)
    tolerance: float | None = None
    advisory: bool = False

    def to_dict(self) -> dict:
        return _plain({
            "schema": REPORT_SCHEMA,
            "check_id": self.check_id,
            "params": self.params,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "residual": float(self.residual),
            "tolerance": self.tolerance,
            "passed": bool(self.passed),
            "advisory": bool(self.advisory),
            "notes": self.notes,
        })

    def summary_line(self) -> str:
        status = "PASS" if self.passed else ("NOTE" if self.advisory else "FAIL")
        return f"[{status}] {self.check_id} residual={self.residual:.3e}"


def reports_to_json(reports) -> str:
    return json.dumps([r.to_dict() for r in reports], sort_keys=True, indent=1) + "\n"


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["check_id", "passed", "advisory", "residual", "tolerance", "lhs", "rhs", "params"])
    for r in reports:
        d = r.to_dict()
        w.writerow([d["check_id"], d["passed"], d["advisory"], repr(d["residual"]), d["tolerance"],
                    json.dumps(d["lhs"]), json.dumps(d["rhs"]), json.dumps(d["params"], sort_keys=True)])
    return buf.getvalue()


def atomic_write_text(path, text: str) -> Path:
    """Write through a temporary file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def write_reports(reports, path, fmt: str = "json") -> Path:
    text = reports_to_json(reports) if fmt == "json" else reports_to_csv(reports)
    return atomic_write_text(path, text)


# ----------------------------------------------------------------- symbols


@dataclass(frozen=True)
class SymbolFamily:
    """Named generators of test symbols.

    Gaussians are given by their parameters; all defaults have bounded
    Toeplitz operators except the radial polynomial, which is kept as the
    unbounded control.
    """

    gaussian_xis: tuple = (0.5, 1.0, 2.0, 1j, 0.5 + 0.5j)
    thetas: tuple = (2 * math.pi,)
    radial_degrees: tuple = (1,)
    bumps: tuple = ((1.0, 0.5),)
    constants: tuple = (1.0,)

    def members(self, n: int = 1) -> list[Symbol]:
        out = [heat_kernel(xi, n) for xi in self.gaussian_xis]
        out += [oscillatory_symbol(th, n) for th in self.thetas]
        out += [smooth_bump(r, w, n) for r, w in self.bumps]
        out += [constant_symbol(c, n) for c in self.constants]
        out += [radial_polynomial(d, n) for d in self.radial_degrees]
        return out

    def bounded_members(self, n: int = 1) -> list[Symbol]:
        return [a for a in self.members(n) if a.bounded_hint is not None]

    def gaussians(self, n: int = 1) -> list[Symbol]:
        return [heat_kernel(xi, n) for xi in self.gaussian_xis]


def A2lambda_stable(a: Symbol, probes=None, Qs=(40, 80), rtol: float = 1e-3) -> bool:
    """Finite and Q-stable ``check_A2lambda`` values at the probes."""
    if probes is None:
        probes = np.array([[0j], [1 + 1j]]) if a.n == 1 else np.zeros((1, a.n), dtype=complex)
    vals = [np.array(check_A2lambda(a, probes, build_grid(a.n, Q if a.n == 1 else min(Q, 12)))) for Q in Qs]
    if not all(np.all(np.isfinite(v)) for v in vals):
        return False
    return bool(np.all(np.abs(vals[-1] - vals[0]) <= rtol * np.abs(vals[-1])))


def toeplitz_for(a: Symbol, trunc: BasisTruncation, config: RunConfig):
    """Direct Toeplitz matrix: radial profiles via Gauss-Laguerre, the rest by quadrature."""
    if a.kind == "radial" and a.profile is not None and trunc.n == 1:
        return toeplitz_radial(a.profile, trunc)
    return toeplitz_quadrature(a, trunc, build_grid(trunc.n, max(config.Q, trunc.K + 8)))


def _op_norm_converged(a: Symbol, config: RunConfig) -> tuple[float, dict]:
    if a.is_gaussian:
        ratio = 1 / abs(1 + 1 / complex(a.xi))
        if ratio > 1:
            raise UnconvergedError(f"T_a for {a.name} is unbounded (eigenvalue ratio {ratio:.6g} > 1)")
    Ks = [config.K // 2, 3 * config.K // 4, config.K]
    tab = convergence_table(lambda K: toeplitz_for(a, BasisTruncation(config.n, K), config), Ks, ps=(2,))
    if not tab.converged("op_norm"):
        raise UnconvergedError(f"op_norm of T_a for {a.name} not converged: {tab.op_norms}")
    return tab.op_norms[-1], {"op_norm_column": tab.op_norms, "Ks": Ks}


# ---------------------------------------------------------- Berger-Coburn


def bc_constant(t: float, n: int = 1, literal: bool = False) -> float:
    """``||Phi_{t-1}||_1`` (1 for ``t >= 1``), or the literal ``(2t - 1)^{-n}``."""
    if not t > 0.5:
        raise ValueError(f"the upper bound needs t > 1/2, got {t}")
    return (2 * t - 1) ** (-n) if literal else semigroup_trace_norm(t - 1, n)


def check_bc_upper(a: Symbol, t: float, config: RunConfig = RunConfig(), literal: bool = False,
                   op_norm: float | None = None) -> VerificationReport:
    """``sup |B_t(a)| <= c(t) ||T_a||`` with both routes for the left side.

    Route 1 is the function heat transform, route 2 is ``T_a * Phi_{t-1}``;
    route-2 samples whose leakage exceeds the threshold are left out and
    counted in the notes.
    """
    pts = config.points()
    params = {"symbol": a.describe(), "t": t, "literal_constant": literal, "config": config.to_dict()}
    notes = {}
    if op_norm is None:
        op_norm, conv = _op_norm_converged(a, config)
        notes["convergence"] = conv
    r1 = heat_transform(a, t, pts, grid=config.grid()).values
    trunc = BasisTruncation(config.n, config.K)
    Ta = toeplitz_for(a, trunc, config)
    flow = heat_flow_operator(Ta, t, pts, semigroup_degree=config.semigroup_K)
    leak = np.asarray(flow.payload.meta["leakage"])
    ok = leak <= config.leakage_threshold
    r2 = flow.payload.values[ok]
    notes["route2_masked_points"] = int((~ok).sum())
    notes["route_difference"] = float(np.max(np.abs(r1[ok] - r2))) if ok.any() else None
    lhs = float(max(np.max(np.abs(r1)), np.max(np.abs(r2)) if r2.size else 0.0))
    if a.is_gaussian:
        # the maximum of |phi_xi| sits at the origin, which is on the grid
        notes["sup"] = "exact (Gaussian maximum at the origin)"
        closed = float(abs(complex(a.xi) + t) ** (-config.n))
        notes["calibration_error"] = abs(lhs - closed)
        gate = abs(lhs - closed) <= CALIBRATION_TOL
        closed_norm = float(abs(complex(a.xi)) ** (-config.n) * abs(1 + 1 / complex(a.xi)) ** (-config.n))
        gate = gate and abs(op_norm - closed_norm) <= CALIBRATION_TOL
        notes["calibration_gate"] = bool(gate)
    else:
        notes["sup"] = "grid-sup only"
        gate = True
    c = bc_constant(t, config.n, literal)
    rhs = c * op_norm
    residual = max(0.0, lhs - rhs)
    passed = bool(gate and lhs <= rhs + config.tol)
    notes.update(c_t=c, op_norm=op_norm)
    if literal:
        # the literal constant is known to fail for (phi_1, t=2); kept as an advisory record
        notes["expected"] = "may fail: literal constant (2t-1)^(-n) is below ||Phi_(t-1)||_1 for t > 1"
    return VerificationReport("bc_upper_literal" if literal else "bc_upper", params, lhs, rhs, residual, passed,
                              notes, config.tol, advisory=literal)


def check_bc_reconstruction(a: Symbol, t: float, config: RunConfig = RunConfig(),
                            tol: float | None = None) -> VerificationReport:
    """``T_a = B_t(a) * Phi_{-t}`` against the direct Toeplitz matrix (relative Frobenius)."""
    if not 0 < t < 0.5:
        raise ValueError(f"reconstruction needs 0 < t < 1/2, got {t}")
    if tol is None:
        tol = 1e-8 if a.is_gaussian else 1e-4
    out = BasisTruncation(config.n, config.recon_K)
    grid = build_grid(config.n, config.recon_Q)
    Bt = heat_transform_symbol(a, t, config.grid())
    res = reconstruct_toeplitz(Bt, t, out, grid=grid, leakage_threshold=config.leakage_threshold)
    R = res.payload.matrix
    direct_op = gaussian_toeplitz(a.xi, out) if a.is_gaussian else toeplitz_for(a, out, config)
    direct = direct_op.matrix
    residual = float(np.linalg.norm(R - direct) / np.linalg.norm(direct))
    sup_B = float(np.max(np.abs(Bt(config.points()))))
    ratio = spectral_summary(direct_op, ps=(math.inf,)).op_norm * (1 - 2 * t) ** config.n / sup_B
    params = {"symbol": a.describe(), "t": t, "config": config.to_dict()}
    notes = {"leakage": res.leakage, "C_pi_sample": ratio, "route": res.quad_meta["route"],
             "K_semigroup": res.quad_meta["K_operator"]}
    return VerificationReport("bc_reconstruction", params, float(np.linalg.norm(R)), float(np.linalg.norm(direct)),
                              residual, residual <= tol, notes, tol)


# -------------------------------------------------------------- Schatten


def _bt_lp_norm(a: Symbol, t: float, p: float, config: RunConfig) -> tuple[float, dict]:
    """``||B_t(a)||_p`` over Lebesgue measure; closed form for Gaussians, quadrature checked against it."""
    if a.bounded_hint == 0:
        return 0.0, {"route": "zero_symbol"}
    if a.is_gaussian:
        s = complex(a.xi) + t
        closed = gaussian_lp_norm(s, p, config.n)
        if math.isinf(p) or (1 / s).real <= 0 or s.imag != 0:
            return closed, {"route": "closed_form"}
        quad = lp_norm(heat_kernel(s.real, config.n), p, config.n, scale=s.real, grid=config.grid())
        return closed, {"route": "closed_form", "quadrature": quad, "calibration_error": abs(quad - closed)}
    raise UnconvergedError(f"no Gaussian-factor extraction available for {a.name}")


def check_schatten(a: Symbol, p: float, t: float, config: RunConfig = RunConfig()) -> VerificationReport:
    """Schatten-class form of the Berger-Coburn bounds; records the implied ``C_pi``.

    For ``t > 1/2``: ``||B_t(a)||_p <= C^{1/p} ||Phi_{t-1}||_1 ||T_a||_p``.
    For ``t < 1/2``: ``||T_a||_p <= C^{1 - 1/p} (1 - 2t)^{-n} ||B_t(a)||_p``.
    The report passes when the implied ``C_pi`` is finite and the quadrature
    calibration holds; ``C_pi`` itself is unknown, so this is advisory.
    """
    n = config.n
    params = {"symbol": a.describe(), "p": p, "t": t, "config": config.to_dict()}
    big = BasisTruncation(n, config.spectral_K)
    if a.is_gaussian:
        Ta = gaussian_toeplitz(a.xi, big)
    else:
        Ta = toeplitz_for(a, BasisTruncation(n, config.K), config)
    if Ta.is_diagonal:
        K_top = Ta.truncation.K
        tab = convergence_table(lambda K: _restrict_diagonal(Ta, K), [K_top // 2, K_top], ps=(p,))
        if not tab.converged(p):
            raise UnconvergedError(f"||T_a||_{p} not converged for {a.name}: {tab.schatten[p]}")
        Ta_p = tab.schatten[p][-1]
    else:
        Ta_p = spectral_summary(Ta, ps=(p,)).schatten[p]
    Bp, bnotes = _bt_lp_norm(a, t, p, config)
    gate = bnotes.get("calibration_error", 0.0) <= CALIBRATION_TOL
    if t > 0.5:
        lhs, rhs = Bp, semigroup_trace_norm(t - 1, n) * Ta_p
        form = "B_t bound"
    elif 0 < t < 0.5:
        lhs, rhs = Ta_p, (1 - 2 * t) ** (-n) * Bp
        form = "T_a bound"
    else:
        raise ValueError(f"t must differ from 1/2 and be positive, got {t}")
    if lhs == 0:
        implied = 0.0  # a zero left side constrains nothing
    elif rhs == 0:
        implied = math.inf
    elif t > 0.5:
        implied = (lhs / rhs) ** p if not math.isinf(p) else (1.0 if lhs <= rhs * (1 + 1e-12) else math.inf)
    elif p == 1:
        implied = 1.0 if lhs <= rhs * (1 + 1e-12) else math.inf
    else:
        implied = (lhs / rhs) ** (p / (p - 1)) if not math.isinf(p) else lhs / rhs
    notes = dict(bnotes, form=form, implied_C_pi=implied, calibration_gate=bool(gate))
    passed = bool(gate and math.isfinite(implied))
    return VerificationReport("schatten", params, lhs, rhs, max(0.0, lhs - rhs), passed, notes, None, advisory=True)


def _restrict_diagonal(S: DiagonalOperator, K: int) -> DiagonalOperator:
    """The same diagonal operator on the smaller truncation of degree ``K``."""
    trunc = BasisTruncation(S.truncation.n, K)
    return DiagonalOperator(np.asarray(S.eigenvalues)[:trunc.D], trunc, dict(S.provenance, K=K))


def _closed_semigroup_pairs():
    return [(0.25, 0.5), (0.5, 0.5), (1.0, 0.5), (1.0, 1.0), (-0.25, 0.5), (0.0, 1.0)]


def estimate_C_pi(family: SymbolFamily = SymbolFamily(), ps=(1, 2, 4, math.inf),
                  config: RunConfig = RunConfig()) -> tuple[float, VerificationReport]:
    """Empirical lower bound for ``C_pi`` from both Young-type inequalities.

    Operator pairs are heat semigroup members and Toeplitz operators of the
    family Gaussians with trace-class Toeplitz operators.  For each pair
    ``(S, T)`` the function ``S * T`` is a Gaussian; its value is checked by
    :func:`convolve_op_op` at a few points before the closed-form ``L^p`` norm
    is used.  Sample ratios:

    * op*op: ``||S*T||_p / (||S||_p ||T||_1)``, implied ``C >= ratio^p``;
    * fn*op, reading A: ``||psi*S||_p / (||psi||_p ||S||_1)``;
    * fn*op, reading B: ``||psi*S||_p / (||psi||_1 ||S||_p)``;
      both with implied ``C >= ratio^{p/(p-1)}``.

    ``p = inf`` ratios are constant-free and must not exceed one.
    """
    n = config.n
    big = BasisTruncation(n, config.spectral_K)
    calib_K = min(config.spectral_K, 80)
    probe = np.array([[0j], [0.5 + 0.25j]]) if n == 1 else np.zeros((1, n), dtype=complex)
    ops = {}
    for s in sorted({s for pr in _closed_semigroup_pairs() for s in pr}):
        ops[f"Phi_{s:g}"] = (complex(s + 1), heat_semigroup(s, big))
    for a in family.gaussians(n):
        if abs(1 + 1 / complex(a.xi)) > 1:
            # T_{phi_xi} = phi_xi * Phi_0, so its QHA "Gaussian width" is xi + 1
            ops[a.name] = (complex(a.xi) + 1, gaussian_toeplitz(a.xi, big))
    samples = []
    calib = 0.0
    names = sorted(ops)
    summ = {k: spectral_summary(v[1], ps=[p for p in ps] + [1]) for k, v in ops.items()}
    for i, sname in enumerate(names):
        for tname in names[i:]:
            ws, S = ops[sname]
            wt, T = ops[tname]
            # S * T = phi_{ws + wt - 1}  (Phi_s * Phi_t = phi_{s+t+1} with widths s+1, t+1)
            width = ws + wt - 1
            if not is_admissible(width) or (1 / width).real <= 0:
                continue
            got = convolve_op_op(_restrict_diagonal(S, calib_K), _restrict_diagonal(T, calib_K),
                                 probe).payload.values
            want = heat_kernel(width, n)(probe)
            calib = max(calib, float(np.max(np.abs(got - want))))
            for p in ps:
                num = gaussian_lp_norm(width, p, n)
                ratio = num / (summ[sname].schatten[p] * summ[tname].schatten[1])
                implied = ratio ** p if not math.isinf(p) else ratio
                samples.append({"form": "op*op", "S": sname, "T": tname, "p": p, "ratio": ratio,
                                "implied_C": implied})
    # fn * op: phi_r * Phi_s = Phi_{r+s}
    for r in (0.5, 1.0, 2.0):
        for s in (0.0, 0.5, -0.25):
            res_op = heat_semigroup(r + s, big)
            S = heat_semigroup(s, big)
            sr = spectral_summary(res_op, ps=list(ps) + [1])
            ss = spectral_summary(S, ps=list(ps) + [1])
            for p in ps:
                a_ratio = sr.schatten[p] / (gaussian_lp_norm(r, p, n) * ss.schatten[1])
                b_ratio = sr.schatten[p] / (gaussian_lp_norm(r, 1, n) * ss.schatten[p])
                for form, ratio in (("fn*op A", a_ratio), ("fn*op B", b_ratio)):
                    if math.isinf(p):
                        implied = ratio
                    elif p == 1:
                        implied = 1.0 if ratio <= 1 + 1e-12 else math.inf
                    else:
                        implied = ratio ** (p / (p - 1))
                    samples.append({"form": form, "psi": f"phi_{r:g}", "S": f"Phi_{s:g}", "p": p,
                                    "ratio": ratio, "implied_C": implied})
    finite = all(math.isfinite(smp["implied_C"]) for smp in samples)
    inf_ratios = [smp["ratio"] for smp in samples if math.isinf(smp["p"]) and smp["form"] == "op*op"]
    inf_ok = all(r <= 1 + 1e-9 for r in inf_ratios)
    estimate = max(smp["implied_C"] for smp in samples if not math.isinf(smp["p"]))
    params = {"ps": list(ps), "config": config.to_dict(), "family": _plain(asdict(family))}
    notes = {"samples": samples, "p_inf_max_ratio": max(inf_ratios) if inf_ratios else None,
             "calibration_error": calib, "calibration_gate": calib <= CALIBRATION_TOL,
             "status": "empirical lower bound, not a proven value"}
    passed = bool(finite and inf_ok and calib <= CALIBRATION_TOL)
    rep = VerificationReport("estimate_C_pi", params, estimate, None, 0.0, passed, notes, None, advisory=True)
    return estimate, rep


# ---------------------------------------------------------------- frontier


def frontier_grid(count_re: int = 10, count_im: int = 7, margin: float = 1e-6) -> list[complex]:
    """Admissible parameters from a grid in ``w = 1/xi``.

    Admissibility is ``Re w > -1/2`` and boundedness is ``|1 + w| >= 1``;
    points within ``margin`` of either boundary are dropped.
    """
    out = []
    for u in np.linspace(-0.45, 1.5, count_re):
        for v in np.linspace(-1.2, 1.2, count_im):
            w = complex(u, v)
            if abs(w) < 1e-9 or abs(abs(1 + w) - 1) < margin or w.real <= -0.5 + margin:
                continue
            out.append(1 / w)
    return out


def find_unbounded_admissible(grid=None) -> complex:
    """First admissible ``xi`` on the grid with ``|1 + 1/xi| < 1``."""
    for xi in (frontier_grid() if grid is None else grid):
        if is_admissible(xi) and abs(1 + 1 / xi) < 1:
            return xi
    raise LookupError("no admissible parameter with an unbounded Toeplitz operator on the grid")


def check_gaussian_frontier(xi_grid=None, config: RunConfig = RunConfig(), Ks=(8, 16, 32, 64)) -> VerificationReport:
    """Boundedness of ``T_{phi_xi}`` from the eigenvalue ratio against op-norm growth."""
    xi_grid = frontier_grid() if xi_grid is None else list(xi_grid)
    bad = [xi for xi in xi_grid if not is_admissible(xi)]
    if bad:
        raise ValueError(f"inadmissible parameters in the grid: {bad[:3]}")
    rows = []
    disagreements = 0
    for xi in xi_grid:
        ratio = 1 / abs(1 + 1 / complex(xi))
        predicted = "bounded" if ratio <= 1 else "growing"
        tab = convergence_table(lambda K: gaussian_toeplitz(xi, BasisTruncation(config.n, K)), list(Ks), ps=(2,))
        observed = tab.growth("op_norm")
        agree = observed == predicted
        disagreements += not agree
        rows.append({"xi": [complex(xi).real, complex(xi).imag], "ratio": ratio, "predicted": predicted,
                     "observed": observed, "agree": agree})
    params = {"grid_size": len(xi_grid), "Ks": list(Ks), "config": config.to_dict()}
    notes = {"rows": rows, "unbounded_count": sum(r["predicted"] == "growing" for r in rows)}
    return VerificationReport("gaussian_frontier", params, disagreements, 0, float(disagreements),
                              disagreements == 0, notes, 0.0)


# ------------------------------------------------------------- compactness


def check_compactness_flow(a: Symbol, t_pairs=((0.25, 0.75),), config: RunConfig = RunConfig(),
                           decay_ratio: float = 0.05) -> VerificationReport:
    """Advisory compactness diagnostic.

    ``T_a`` counts as compact-like when its singular values at degree ``K``
    agree with those at ``3K/2`` index by index (they have stabilized) and
    the last one is below ``decay_ratio`` times the first.  ``B_{t_hi}(a)``
    counts as vanishing when its maximum on a ring of radius twice the grid
    extent is below ``decay_ratio`` times its grid maximum.  The two
    classifications must agree.
    """
    n = config.n
    K2 = (3 * config.K) // 2
    sv = spectral_summary(toeplitz_for(a, BasisTruncation(n, config.K), config), ps=(2,)).singular_values
    sv2 = spectral_summary(toeplitz_for(a, BasisTruncation(n, K2), config), ps=(2,)).singular_values
    top = max(sv[0], np.finfo(float).tiny)
    stable = bool(np.all(np.abs(sv - sv2[: len(sv)]) <= 1e-6 * top))
    decays = bool(stable and sv[-1] <= decay_ratio * top)
    pts = config.points()
    angles = np.linspace(0, 2 * np.pi, 16, endpoint=False)
    ring = np.zeros((len(angles), n), dtype=complex)
    ring[:, 0] = 2 * config.extent * np.exp(1j * angles)
    rows = []
    consistent = True
    for t_lo, t_hi in t_pairs:
        grid_vals = np.abs(heat_transform(a, t_hi, pts, grid=config.grid()).values)
        ring_vals = np.abs(heat_transform(a, t_hi, ring, grid=config.grid()).values)
        vanishes = bool(ring_vals.max() <= decay_ratio * max(grid_vals.max(), np.finfo(float).tiny))
        consistent = consistent and (vanishes == decays)
        rows.append({"t_lo": t_lo, "t_hi": t_hi, "ring_max": float(ring_vals.max()),
                     "grid_max": float(grid_vals.max()), "vanishes": vanishes})
    params = {"symbol": a.describe(), "t_pairs": [list(p) for p in t_pairs], "config": config.to_dict()}
    notes = {"decay_profile": sv[:10].tolist(), "last_singular_value": float(sv[-1]),
             "spectrum_stable": stable, "compact_proxy": decays, "rows": rows}
    return VerificationReport("compactness_flow", params, decays, [row["vanishes"] for row in rows],
                              0.0 if consistent else 1.0, consistent, notes, None, advisory=True)


# ---------------------------------------------------------------- suites


def _rel(a, b):
    return float(np.max(np.abs(a - b) / np.abs(b)))


def check_semigroup_eigenvalues(ts=(0.3, 1.0, 2.7), K: int = 24, Q: int = 64, tol: float = 1e-9) -> VerificationReport:
    trunc = BasisTruncation(1, K)
    worst = 0.0
    for t in ts:
        mat = toeplitz_quadrature(heat_kernel(t), trunc, build_grid(1, Q)).matrix
        m = np.arange(K + 1)
        worst = max(worst, _rel(np.diag(mat).real, t**m / (1 + t) ** (m + 1)),
                    float(np.max(np.abs(mat - np.diag(np.diag(mat))))))
    return VerificationReport("semigroup_eigenvalues", {"ts": list(ts), "K": K, "Q": Q}, worst, 0.0, worst,
                              worst <= tol, {}, tol)


def check_trace_norms(ts=(0.0, 0.5, 1.0, 3.0, -0.1, -0.25, -0.4), K: int = 200, tol: float = 1e-8) -> VerificationReport:
    rows = []
    worst = 0.0
    for t in ts:
        got = spectral_summary(heat_semigroup(t, BasisTruncation(1, K)), ps=(1,)).schatten[1]
        want = semigroup_trace_norm(t, 1)
        worst = max(worst, abs(got - want))
        rows.append({"t": t, "numeric": got, "closed": want})
    return VerificationReport("trace_norms", {"ts": list(ts), "K": K}, worst, 0.0, worst, worst <= tol,
                              {"rows": rows}, tol)


def check_op_op_identity(pairs=None, K: int = 40, tol: float = 1e-6, points=None) -> VerificationReport:
    """``Phi_s * Phi_t = phi_{s+t+1}`` (relative error on the grid)."""
    if pairs is None:
        pairs = [(s, t) for s in (0.25, 0.5, 1.0) for t in (0.25, 0.5, 1.0)] + [(-0.25, 0.5)]
    if points is None:
        ax = np.linspace(-2, 2, 5)
        points = (ax[:, None] + 1j * ax[None, :]).reshape(-1, 1)
    trunc = BasisTruncation(1, K)
    worst, leak = 0.0, 0.0
    for s, t in pairs:
        res = convolve_op_op(heat_semigroup(s, trunc), heat_semigroup(t, trunc), points)
        worst = max(worst, _rel(res.payload.values, heat_kernel(s + t + 1)(points)))
        leak = max(leak, res.leakage)
    return VerificationReport("op_op_identity", {"pairs": [list(p) for p in pairs], "K": K, "points": len(points)},
                              worst, 0.0, worst, worst <= tol, {"max_leakage": leak}, tol)


def check_fn_op_identity(pairs=((0.5, 0.3), (1.0, 0.5), (1.2, -0.3), (0.3, -0.2)), K_out: int = 16,
                         K_op: int = 40, Q: int = 64, tol: float = 1e-7) -> VerificationReport:
    """``phi_t * Phi_s = Phi_{t+s}`` entrywise."""
    out = BasisTruncation(1, K_out)
    grid = build_grid(1, Q)
    worst, leak = 0.0, 0.0
    for t, s in pairs:
        res = convolve_fn_op(heat_kernel(t), heat_semigroup(s, BasisTruncation(1, K_op)), grid, out)
        worst = max(worst, float(np.max(np.abs(res.payload.matrix - heat_semigroup(t + s, out).matrix))))
        leak = max(leak, res.leakage)
    return VerificationReport("fn_op_identity", {"pairs": [list(p) for p in pairs], "K_out": K_out, "K_op": K_op,
                                                 "Q": Q}, worst, 0.0, worst, worst <= tol, {"max_leakage": leak}, tol)


def check_fn_phi_toeplitz(symbols=None, K: int = 16, Q: int = 64, tol: float = 1e-7) -> VerificationReport:
    """``a * Phi_0`` against the direct Toeplitz matrix, entrywise."""
    if symbols is None:
        symbols = [constant_symbol(1.0), heat_kernel(1.0), radial_polynomial(1), oscillatory_symbol()]
    trunc = BasisTruncation(1, K)
    grid = build_grid(1, Q)
    cfg = RunConfig(K=K, Q=Q)
    rows = []
    worst = 0.0
    for a in symbols:
        res = convolve_fn_op(a, heat_semigroup(0.0, trunc), grid)
        err = float(np.max(np.abs(res.payload.matrix - toeplitz_for(a, trunc, cfg).matrix)))
        worst = max(worst, err)
        rows.append({"symbol": a.name, "error": err})
    return VerificationReport("fn_phi_toeplitz", {"K": K, "Q": Q}, worst, 0.0, worst, worst <= tol, {"rows": rows}, tol)


def check_displacement_oracle(zs=(0.0, 0.4 - 0.3j, 1.0 + 0.5j, -1.5, 1.06j - 1.06), K: int = 12, Q: int = 80,
                              tol: float = 1e-8) -> VerificationReport:
    trunc = BasisTruncation(1, K)
    grid = build_grid(1, Q)
    worst = 0.0
    for z in zs:
        W = displacement_matrix(np.array([z]), trunc).matrix
        worst = max(worst, float(np.max(np.abs(W - displacement_oracle(np.array([z]), trunc, grid)))))
    return VerificationReport("displacement_oracle", {"zs": [[complex(z).real, complex(z).imag] for z in zs], "K": K,
                                                      "Q": Q}, worst, 0.0, worst, worst <= tol, {}, tol)


def check_berezin_route(config: RunConfig = RunConfig(), tol: float = 1e-9) -> VerificationReport:
    """``B(S)`` from kernel coefficients against ``S * Phi_0``."""
    trunc = BasisTruncation(config.n, config.K)
    pts = default_points(config.n, 1.0)
    ops = [heat_semigroup(0.5, trunc), heat_semigroup(-0.25, trunc),
           toeplitz_for(oscillatory_symbol(n=config.n), trunc, config)]
    worst = 0.0
    for S in ops:
        b = berezin(S, pts).values
        c = convolve_op_op(S, heat_semigroup(0.0, trunc), pts).payload.values
        worst = max(worst, float(np.max(np.abs(b - c))))
    return VerificationReport("berezin_route", {"config": config.to_dict()}, worst, 0.0, worst, worst <= tol, {}, tol)


SUITES = ("identities", "bc", "schatten", "frontier", "compactness")


def run_suite(name: str, config: RunConfig = RunConfig(), family: SymbolFamily = SymbolFamily(),
              symbols=None) -> list[VerificationReport]:
    """Run one named suite; ``symbols`` overrides the family members."""
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {SUITES}")
    members = list(symbols) if symbols is not None else None
    reports: list[VerificationReport] = []
    if name == "identities":
        reports += [check_semigroup_eigenvalues(), check_trace_norms(), check_op_op_identity(),
                    check_fn_op_identity(), check_fn_phi_toeplitz(), check_displacement_oracle(),
                    check_berezin_route(config)]
    elif name == "bc":
        for a in members or family.bounded_members(config.n):
            try:
                norm, _ = _op_norm_converged(a, config)
            except UnconvergedError as exc:
                reports.append(VerificationReport("bc_upper", {"symbol": a.describe()}, None, None, math.inf,
                                                  False, {"error": str(exc), "unconverged": True},
                                                  config.tol))
                continue
            for t in (0.6, 0.75, 1.0, 1.5, 2.0):
                reports.append(check_bc_upper(a, t, config, op_norm=norm))
            for t in (0.1, 0.25, 0.4):
                reports.append(check_bc_reconstruction(a, t, config))
        if symbols is None:
            reports.append(check_bc_upper(heat_kernel(1.0, config.n), 2.0, config, literal=True))
    elif name == "schatten":
        for a in members or family.gaussians(config.n):
            if not a.is_gaussian or abs(1 + 1 / complex(a.xi)) <= 1:
                continue
            for p in (1, 2, math.inf):
                for t in (0.25, 0.75, 1.0):
                    reports.append(check_schatten(a, p, t, config))
        reports.append(estimate_C_pi(family, config=config)[1])
    elif name == "frontier":
        reports.append(check_gaussian_frontier(config=config))
    elif name == "compactness":
        for a in members or family.members(config.n):
            reports.append(check_compactness_flow(a, config=config))
    return reports


__all__ = [
    "RunConfig",
    "VerificationReport",
    "SymbolFamily",
    "UnconvergedError",
    "REPORT_SCHEMA",
    "A2lambda_stable",
    "toeplitz_for",
    "bc_constant",
    "check_bc_upper",
    "check_bc_reconstruction",
    "check_schatten",
    "estimate_C_pi",
    "frontier_grid",
    "find_unbounded_admissible",
    "check_gaussian_frontier",
    "check_compactness_flow",
    "check_semigroup_eigenvalues",
    "check_trace_norms",
    "check_op_op_identity",
    "check_fn_op_identity",
    "check_fn_phi_toeplitz",
    "check_displacement_oracle",
    "check_berezin_route",
    "run_suite",
    "SUITES",
    "reports_to_json",
    "reports_to_csv",
    "write_reports",
    "atomic_write_text",
]

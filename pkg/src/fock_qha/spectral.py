"""Norms and spectra of truncated operators."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .fock_core import BasisTruncation

CONVERGENCE_RTOL = 1e-8


class SpectralError(RuntimeError):
    """An SVD that failed to converge, reported with the operator provenance."""


def _schatten(sv: np.ndarray, p) -> float:
    if p == math.inf:
        return float(sv[0]) if sv.size else 0.0
    if sv.size == 0 or sv[0] == 0:
        return 0.0
    # scale by the largest value so sigma^p cannot underflow or overflow
    top = sv[0]
    return float(top * math.fsum(((sv / top) ** p).tolist()) ** (1.0 / p))


def _check_ps(ps):
    ps = list(ps)
    if not ps:
        raise ValueError("at least one Schatten exponent is required")
    for p in ps:
        if not p >= 1:
            raise ValueError(f"Schatten exponents must satisfy p >= 1, got {p}")
    return ps


@dataclass(frozen=True, eq=False)
class SpectralSummary:
    """Singular values (descending) and the norms derived from them."""

    singular_values: np.ndarray
    op_norm: float
    trace: complex
    schatten: dict
    truncation: BasisTruncation

    @property
    def trace_norm(self) -> float:
        return _schatten(self.singular_values, 1)

    def decay_profile(self, count: int = 10) -> list[float]:
        """Leading singular values, used as the compactness diagnostic."""
        return [float(s) for s in self.singular_values[:count]]


def singular_values(S, use_svd: bool | None = None) -> np.ndarray:
    """Descending singular values; diagonal operators sort ``|eigenvalues|`` unless ``use_svd``."""
    if S.is_diagonal and not use_svd:
        return np.sort(np.abs(np.asarray(S.eigenvalues)))[::-1]
    try:
        sv = np.linalg.svd(S.matrix, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise SpectralError(f"SVD failed for operator {getattr(S, 'provenance', {})}: {exc}") from exc
    return np.sort(sv)[::-1]


def spectral_summary(S, ps=(1, 2, math.inf), use_svd: bool | None = None) -> SpectralSummary:
    ps = _check_ps(ps)
    sv = singular_values(S, use_svd)
    if S.is_diagonal:
        ev = np.asarray(S.eigenvalues, dtype=complex)
        trace = complex(math.fsum(ev.real.tolist()), math.fsum(ev.imag.tolist()))
    else:
        d = np.diag(S.matrix)
        trace = complex(math.fsum(d.real.tolist()), math.fsum(d.imag.tolist()))
    return SpectralSummary(
        singular_values=sv,
        op_norm=float(sv[0]) if sv.size else 0.0,
        trace=trace,
        schatten={p: _schatten(sv, p) for p in ps},
        truncation=S.truncation,
    )


def _p_label(p) -> str:
    return "inf" if p == math.inf else f"{p:g}"


@dataclass
class ConvergenceTable:
    """Rows ``(K, op_norm, schatten_p...)`` over increasing truncation degrees."""

    Ks: list
    ps: list
    op_norms: list
    schatten: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def column(self, key) -> np.ndarray:
        if key == "op_norm":
            return np.asarray(self.op_norms)
        return np.asarray(self.schatten[key])

    def converged(self, key="op_norm", rtol: float = CONVERGENCE_RTOL) -> bool:
        """Two consecutive degrees with relative change below ``rtol``."""
        col = self.column(key)
        if len(col) < 2:
            return False
        a, b = col[-2], col[-1]
        if not (np.isfinite(a) and np.isfinite(b)):
            return False
        return bool(abs(b - a) <= rtol * max(abs(a), abs(b), np.finfo(float).tiny))

    def growth(self, key="op_norm") -> str:
        """``"bounded"`` when converged, ``"growing"`` when increasing across every step, else ``"undecided"``."""
        if self.converged(key):
            return "bounded"
        col = self.column(key)
        if len(col) >= 2 and np.all(np.diff(col) > 0):
            return "growing"
        return "undecided"

    def rows(self) -> list[dict]:
        out = []
        for i, K in enumerate(self.Ks):
            row = {"K": K, "op_norm": self.op_norms[i]}
            for p in self.ps:
                row[f"schatten_{_p_label(p)}"] = self.schatten[p][i]
            out.append(row)
        return out

    def to_csv(self) -> str:
        rows = self.rows()
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(rows[0].keys()), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: (repr(float(v)) if k != "K" else v) for k, v in r.items()})
        return buf.getvalue()

    def to_json(self) -> str:
        payload = {"rows": self.rows(), "meta": self.meta,
                   "converged": {"op_norm": self.converged("op_norm")}}
        return json.dumps(payload, sort_keys=True, indent=2, allow_nan=True)


def convergence_table(builder, Ks, ps=(1, 2), use_svd: bool | None = None) -> ConvergenceTable:
    """Evaluate ``spectral_summary(builder(K))`` for each ``K`` in ``Ks`` (strictly increasing)."""
    Ks = [int(k) for k in Ks]
    if any(b <= a for a, b in zip(Ks, Ks[1:])):
        raise ValueError(f"truncation degrees must be strictly increasing, got {Ks}")
    ps = _check_ps(ps)
    op_norms = []
    sch = {p: [] for p in ps}
    for K in Ks:
        summ = spectral_summary(builder(K), ps, use_svd)
        op_norms.append(summ.op_norm)
        for p in ps:
            sch[p].append(summ.schatten[p])
    return ConvergenceTable(Ks, ps, op_norms, sch)


__all__ = [
    "SpectralSummary",
    "SpectralError",
    "ConvergenceTable",
    "spectral_summary",
    "singular_values",
    "convergence_table",
    "CONVERGENCE_RTOL",
]

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fock_qha.fock_core import BasisTruncation
from fock_qha.operators import (
    DiagonalOperator,
    OperatorMatrix,
    gaussian_toeplitz,
    heat_semigroup,
    toeplitz_quadrature,
    toeplitz_radial,
    translate_operator,
)
from fock_qha.spectral import SpectralError, convergence_table, singular_values, spectral_summary
from fock_qha.symbols import oscillatory_symbol, radial_polynomial, smooth_bump


def test_semigroup_summary():
    summ = spectral_summary(heat_semigroup(1.0, BasisTruncation(1, 60)), ps=(1, 2))
    assert summ.op_norm == 0.5
    assert summ.trace_norm == pytest.approx(1 - 2.0**-61, abs=1e-15)
    assert summ.schatten[2] == pytest.approx(3**-0.5, abs=1e-15)
    assert summ.trace.real == pytest.approx(summ.trace_norm, abs=1e-15)


def test_negative_time_trace_norm():
    summ = spectral_summary(heat_semigroup(-0.25, BasisTruncation(1, 200)), ps=(1,))
    assert summ.schatten[1] == pytest.approx(2.0, abs=1e-10)
    assert summ.trace.real == pytest.approx(1.0, abs=1e-10)


def test_identity_hilbert_schmidt():
    tr = BasisTruncation(2, 4)
    ident = OperatorMatrix(np.eye(tr.D, dtype=complex), tr, {"op": "identity"})
    summ = spectral_summary(ident, ps=(2, math.inf))
    assert summ.schatten[2] == pytest.approx(math.sqrt(tr.D))
    assert summ.schatten[math.inf] == pytest.approx(1.0)


def test_singular_values_descending_nonnegative():
    op = toeplitz_quadrature(oscillatory_symbol(), BasisTruncation(1, 20))
    sv = spectral_summary(op).singular_values
    assert np.all(sv >= 0)
    assert np.all(np.diff(sv) <= 0)


@pytest.mark.parametrize("p", [0.5, 0, -1])
def test_rejects_small_p(p):
    with pytest.raises(ValueError):
        spectral_summary(heat_semigroup(1.0, BasisTruncation(1, 4)), ps=(p,))


def test_rejects_empty_ps():
    with pytest.raises(ValueError):
        spectral_summary(heat_semigroup(1.0, BasisTruncation(1, 4)), ps=())


def test_svd_failure_reports_provenance(monkeypatch):
    def boom(*args, **kwargs):
        raise np.linalg.LinAlgError("did not converge")

    monkeypatch.setattr(np.linalg, "svd", boom)
    op = OperatorMatrix(np.eye(3, dtype=complex), BasisTruncation(1, 2), {"op": "probe"})
    with pytest.raises(SpectralError, match="probe"):
        spectral_summary(op)


@pytest.mark.parametrize("build", [
    lambda tr: heat_semigroup(0.7, tr),
    lambda tr: heat_semigroup(-0.3, tr),
    lambda tr: gaussian_toeplitz(0.5 + 0.5j, tr),
    lambda tr: toeplitz_radial(smooth_bump().profile, tr),
])
def test_diagonal_and_svd_paths_agree(build):
    op = build(BasisTruncation(1, 40))
    fast = singular_values(op)
    slow = singular_values(op, use_svd=True)
    assert np.max(np.abs(fast - slow)) < 1e-12


_OPERATORS = [
    heat_semigroup(1.0, BasisTruncation(1, 30)),
    heat_semigroup(-0.4, BasisTruncation(1, 30)),
    gaussian_toeplitz(1j, BasisTruncation(1, 30)),
    toeplitz_quadrature(oscillatory_symbol(), BasisTruncation(1, 20)),
    toeplitz_radial(radial_polynomial(1).profile, BasisTruncation(1, 20)),
]


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(range(len(_OPERATORS))),
       st.lists(st.floats(1.0, 12.0), min_size=2, max_size=5, unique=True))
def test_schatten_non_increasing_in_p(idx, ps):
    ps = sorted(ps) + [math.inf]
    summ = spectral_summary(_OPERATORS[idx], ps=ps)
    vals = [summ.schatten[p] for p in ps]
    assert all(b <= a * (1 + 1e-12) for a, b in zip(vals, vals[1:]))


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(0.0, 10.0), min_size=1, max_size=30))
def test_schatten_formula_on_random_diagonals(vals):
    tr = BasisTruncation(1, len(vals) - 1)
    op = DiagonalOperator(np.array(vals, dtype=complex), tr, {"op": "random"})
    summ = spectral_summary(op, ps=(2,))
    assert summ.schatten[2] == pytest.approx(math.sqrt(math.fsum(v * v for v in vals)), rel=1e-12, abs=1e-300)
    assert summ.op_norm == max(vals)


@pytest.mark.parametrize("z", [0.5 + 0.5j, -0.8j, 1.0])
def test_unitary_invariance_under_translation(z):
    S = heat_semigroup(1.0, BasisTruncation(1, 60))
    moved = translate_operator(np.array([z]), S)
    a = spectral_summary(S, ps=(1, 2))
    b = spectral_summary(moved, ps=(1, 2))
    tol = 1e-8 + 10 * moved.diagnostics["leakage"]
    assert abs(a.op_norm - b.op_norm) <= tol
    assert abs(a.schatten[2] - b.schatten[2]) <= tol
    assert abs(a.schatten[1] - b.schatten[1]) <= tol


def test_convergence_table_semigroup():
    tab = convergence_table(lambda K: heat_semigroup(1.0, BasisTruncation(1, K)), [8, 16, 32], ps=(1, 2))
    assert tab.op_norms == [0.5, 0.5, 0.5]
    assert tab.converged("op_norm")
    assert tab.growth("op_norm") == "bounded"
    assert not tab.converged(1)  # trace norm deficit 2^-(K+1) halves per step


def test_convergence_table_radial_polynomial():
    Ks = [4, 8, 16, 24]
    tab = convergence_table(lambda K: toeplitz_radial(radial_polynomial(1).profile, BasisTruncation(1, K)), Ks)
    assert np.allclose(tab.op_norms, [K + 1 for K in Ks], rtol=1e-12)
    assert tab.growth("op_norm") == "growing"


def test_convergence_table_gaussian_i():
    tab = convergence_table(lambda K: gaussian_toeplitz(1j, BasisTruncation(1, K)), [8, 16, 32])
    assert np.allclose(tab.op_norms, 2**-0.5, rtol=1e-14)
    assert tab.growth() == "bounded"


def test_convergence_table_requires_increasing():
    with pytest.raises(ValueError):
        convergence_table(lambda K: heat_semigroup(1.0, BasisTruncation(1, K)), [8, 8])


def test_convergence_table_serialization():
    tab = convergence_table(lambda K: heat_semigroup(1.0, BasisTruncation(1, K)), [4, 8], ps=(1, math.inf))
    lines = tab.to_csv().splitlines()
    assert lines[0] == "K,op_norm,schatten_1,schatten_inf"
    assert lines[1].startswith("4,0.5,")
    payload = json.loads(tab.to_json())
    assert payload["rows"][1]["K"] == 8
    assert payload["converged"]["op_norm"] is True


def test_growth_undecided():
    from fock_qha.spectral import ConvergenceTable

    tab = ConvergenceTable([1, 2, 3], [], [1.0, 0.5, 0.7])
    assert tab.growth() == "undecided"
    assert not ConvergenceTable([1], [], [1.0]).converged()


def test_decay_profile():
    summ = spectral_summary(heat_semigroup(1.0, BasisTruncation(1, 20)))
    assert summ.decay_profile(3) == [0.5, 0.25, 0.125]

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fock_qha.fock_core import (
    BasisTruncation,
    FockVector,
    apply_parity,
    enumerate_indices,
    kernel_coefficients,
    kernel_leakage_closed_form,
    kernel_table,
    monomial_table,
    monomial_value,
    parity_sign,
)
from fock_qha.quadrature import build_grid


def test_enumerate_one_variable():
    assert enumerate_indices(1, 2) == [(0,), (1,), (2,)]


def test_enumerate_tie_break_is_lexicographic():
    assert enumerate_indices(2, 1) == [(0, 0), (0, 1), (1, 0)]


@pytest.mark.parametrize("n,K", [(2, 3), (3, 4), (1, 0), (4, 2)])
def test_enumerate_count_is_binomial(n, K):
    idx = enumerate_indices(n, K)
    assert len(idx) == math.comb(K + n, n)
    assert len(set(idx)) == len(idx)
    degrees = [sum(m) for m in idx]
    assert degrees == sorted(degrees)


@pytest.mark.parametrize("n,K", [(0, 2), (-1, 1), (2, -1), (1.5, 2)])
def test_enumerate_rejects_bad_input(n, K):
    with pytest.raises(ValueError):
        enumerate_indices(n, K)


def test_truncation_layout():
    tr = BasisTruncation(2, 3)
    assert tr.D == 10
    assert tr.position((0, 0)) == 0
    assert tr.indices[tr.position((2, 1))] == (2, 1)
    assert list(tr.shell(1)) == [1, 2]
    with pytest.raises(KeyError):
        tr.position((4, 0))


def test_monomial_value_examples():
    assert monomial_value((0,), 3.7 - 2j) == 1
    assert monomial_value((1,), 1.0) == pytest.approx(math.sqrt(math.pi))
    assert monomial_value((2,), 1j) == pytest.approx(-math.pi / math.sqrt(2))


def test_monomial_value_two_variables():
    z = np.array([0.3 + 0.1j, -0.7j])
    want = math.sqrt(math.pi**3 / (1 * 2)) * z[0] * z[1] ** 2
    assert monomial_value((1, 2), z) == pytest.approx(want)


def test_monomial_table_matches_pointwise():
    tr = BasisTruncation(2, 4)
    z = np.array([[0.2 - 0.5j, 1.1 + 0.3j]])
    tab = monomial_table(z, tr)[0]
    for pos, m in enumerate(tr.indices):
        assert tab[pos] == pytest.approx(monomial_value(m, z[0]), rel=1e-13)


def test_monomial_table_large_degree_is_finite():
    tab = monomial_table(np.array([[3.0 + 0j]]), BasisTruncation(1, 300))
    assert np.all(np.isfinite(tab))


def test_kernel_at_origin_is_e0():
    v = kernel_coefficients(np.array([0j]), BasisTruncation(1, 8))
    assert v.coeffs[0] == 1
    assert np.all(v.coeffs[1:] == 0)
    assert v.leakage == 0


def test_kernel_norm_partial_exponential_sum():
    K = 10
    v = kernel_coefficients(np.array([1.0 + 0j]), BasisTruncation(1, K))
    want = math.exp(-math.pi) * sum(math.pi**k / math.factorial(k) for k in range(K + 1))
    assert v.norm() ** 2 == pytest.approx(want, rel=1e-13)
    assert v.leakage == pytest.approx(kernel_leakage_closed_form(1.0, K), rel=1e-9)
    assert v.coeffs[0] == pytest.approx(math.exp(-math.pi / 2))


def test_kernel_overlap_with_origin_kernel_is_phi1():
    # |<k_z, k_0>|^2 = exp(-pi |z|^2) = phi_1(z)
    tr = BasisTruncation(1, 40)
    z = np.array([0.4 - 0.9j])
    k0 = kernel_coefficients(np.array([0j]), tr)
    kz = kernel_coefficients(z, tr)
    assert abs(kz.inner(k0)) ** 2 == pytest.approx(math.exp(-math.pi * abs(z[0]) ** 2), rel=1e-12)


def test_basis_orthonormal_under_quadrature():
    tr = BasisTruncation(1, 12)
    grid = build_grid(1, 16)
    E = monomial_table(grid.nodes, tr)
    gram = (E.conj().T * grid.weights) @ E
    assert np.max(np.abs(gram - np.eye(tr.D))) < 1e-12


def test_basis_orthonormal_two_dimensions():
    tr = BasisTruncation(2, 3)
    grid = build_grid(2, 5)
    E = monomial_table(grid.nodes, tr)
    gram = (E.conj().T * grid.weights) @ E
    assert np.max(np.abs(gram - np.eye(tr.D))) < 1e-12


@settings(max_examples=40, deadline=None)
@given(
    coeffs=st.lists(st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False), min_size=9, max_size=9),
    zr=st.floats(-1.5, 1.5),
    zi=st.floats(-1.5, 1.5),
)
def test_truncated_reproducing_property(coeffs, zr, zi):
    # <f, K_z> = f(z) for polynomials of degree <= K; K_z = exp(pi|z|^2/2) k_z
    tr = BasisTruncation(1, 8)
    f = FockVector(np.array(coeffs), tr)
    z = np.array([complex(zr, zi)])
    Kz = FockVector(np.exp(np.pi * abs(z[0]) ** 2 / 2) * kernel_coefficients(z, tr).coeffs, tr)
    val = f.evaluate(z[None, :])[0]
    assert f.inner(Kz) == pytest.approx(val, rel=1e-10, abs=1e-10)


@given(st.lists(st.integers(0, 6), min_size=1, max_size=4))
def test_parity_sign_squares_to_one(m):
    assert parity_sign(m) ** 2 == 1
    assert parity_sign(m) == (-1) ** sum(m)


def test_parity_examples_and_involution():
    assert parity_sign((0, 0)) == 1
    assert parity_sign((3,)) == -1
    assert parity_sign((1, 2)) == -1
    tr = BasisTruncation(2, 4)
    v = FockVector(np.arange(tr.D) + 1j, tr)
    assert np.array_equal(apply_parity(apply_parity(v)).coeffs, v.coeffs)


def test_parity_matches_reflection():
    tr = BasisTruncation(1, 7)
    v = FockVector(np.linspace(1, 2, tr.D) + 0.5j, tr)
    z = np.array([[0.3 - 0.2j]])
    assert apply_parity(v).evaluate(z)[0] == pytest.approx(v.evaluate(-z)[0], rel=1e-13)


def test_kernel_table_rows():
    tr = BasisTruncation(1, 5)
    pts = np.array([[0.1j], [0.5 + 0.5j]])
    tab = kernel_table(pts, tr)
    for row, p in zip(tab, pts):
        assert np.allclose(row, kernel_coefficients(p, tr).coeffs, rtol=1e-14)

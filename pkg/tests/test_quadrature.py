import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fock_qha.fock_core import BasisTruncation, monomial_table
from fock_qha.quadrature import (
    QuadratureError,
    build_grid,
    compensated_sum,
    gaussian_moment,
    integrate,
    integrate_shifted,
    scaled_coordinates,
    weighted_array_sum,
)


def test_one_point_rule():
    g = build_grid(1, 1)
    assert g.size == 1
    assert g.nodes[0, 0] == 0
    assert g.weights[0] == pytest.approx(1.0)


@pytest.mark.parametrize("n,Q", [(1, 1), (1, 7), (1, 40), (2, 6), (3, 3)])
def test_weights_form_probability(n, Q):
    g = build_grid(n, Q)
    assert g.size == Q ** (2 * n)
    assert np.all(g.weights > 0)
    assert math.fsum(g.weights) == pytest.approx(1.0, abs=1e-12)
    assert integrate(g, lambda z: np.ones(len(z))) == pytest.approx(1.0, abs=1e-12)


def test_second_moment():
    g = build_grid(1, 20)
    val = integrate(g, lambda z: np.pi * np.abs(z[:, 0]) ** 2)
    assert val == pytest.approx(1.0, abs=1e-12)


def test_node_budget():
    with pytest.raises(QuadratureError):
        build_grid(3, 30)
    with pytest.raises(QuadratureError):
        build_grid(1, 0)


def test_grid_is_read_only():
    g = build_grid(1, 4)
    with pytest.raises(ValueError):
        g.nodes[0, 0] = 1.0


@settings(max_examples=50, deadline=None)
@given(ax=st.integers(0, 7), ay=st.integers(0, 7), bx=st.integers(0, 5), by=st.integers(0, 5))
def test_exact_for_polynomials(ax, ay, bx, by):
    g = build_grid(2, 7)
    def f(z):
        return z[:, 0].real ** ax * z[:, 0].imag ** ay * z[:, 1].real ** bx * z[:, 1].imag ** by
    want = gaussian_moment([ax, bx], [ay, by])
    got = integrate(g, f)
    assert abs(got - want) <= 1e-12 * max(1.0, abs(want))


def test_orthogonality_examples():
    g = build_grid(1, 10)
    tr = BasisTruncation(1, 6)
    def entry(m, k):
        return integrate(g, lambda z: monomial_table(z, tr)[:, m] * np.conj(monomial_table(z, tr)[:, k]))
    assert abs(entry(2, 5)) < 1e-12
    assert entry(6, 6) == pytest.approx(1.0, abs=1e-12)


def test_reproducing_kernel_norm():
    # <K_1, K_1> = K_1(1) = e^pi, with K_1(z) = exp(pi z)
    g = build_grid(1, 60)
    val = integrate(g, lambda z: np.exp(np.pi * (z[:, 0] + np.conj(z[:, 0]))))
    assert val.real == pytest.approx(math.exp(math.pi), rel=1e-10)


def test_non_finite_integrand_names_node():
    g = build_grid(1, 3)
    def f(z):
        out = np.ones(len(z))
        out[4] = np.nan
        return out
    with pytest.raises(QuadratureError, match="node 4"):
        integrate(g, f)


def test_integrate_shifted_heat_kernel_mass():
    # int phi_t dm with w = sqrt(t) v: phi_t(sqrt(t) v) t = exp(-pi|v|^2)
    g = build_grid(1, 20)
    assert integrate_shifted(g, lambda z: np.ones(len(z)), lambda z: np.ones(len(z))) == pytest.approx(1.0)
    t = 0.5
    # phi_t(sqrt(t) v) = exp(-pi|v|^2) / t and dm(w) = t dm(v)
    val = integrate_shifted(g, lambda v: np.full(len(v), 1 / t), lambda v: np.full(len(v), t))
    assert val == pytest.approx(1.0, abs=1e-10)


def test_integrate_shifted_semigroup_at_origin():
    # (phi_s * phi_t)(0) = int phi_s(-w) phi_t(w) dm(w); with w = sqrt(t) v
    s = t = 0.5
    g = build_grid(1, 30)
    val = integrate_shifted(g, lambda v: (1 / s) * np.exp(-np.pi * t * np.abs(v[:, 0]) ** 2 / s),
                            lambda v: np.ones(len(v)))
    assert val.real == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("c", [1.5, 2 - 1j, 0.4 + 0.3j])
def test_scaled_coordinates_gaussian_mass(c):
    # int exp(-pi c |z|^2) dm = 1/c, and the second moment int pi|z|^2 exp(-pi c|z|^2) dm = 1/c^2
    g = build_grid(1, 12)
    z, zb, jac = scaled_coordinates(g, c)
    mass = compensated_sum(np.full(g.size, jac), g.weights)
    second = compensated_sum(jac * np.pi * z[:, 0] * zb[:, 0], g.weights)
    assert mass == pytest.approx(1 / c, rel=1e-13)
    assert second == pytest.approx(1 / c**2, rel=1e-12)


def test_scaled_coordinates_rejects_bad_scale():
    with pytest.raises(QuadratureError):
        scaled_coordinates(build_grid(1, 2), -0.5 + 1j)


def test_weighted_array_sum_matches_direct():
    rng = np.random.default_rng(4)
    w = rng.random(1000)
    vals = rng.standard_normal((1000, 3, 2)) + 1j * rng.standard_normal((1000, 3, 2))
    got = weighted_array_sum(w, lambda sl: vals[sl], 1000, chunk=64)
    assert np.allclose(got, np.tensordot(w, vals, axes=(0, 0)), rtol=1e-13)
    again = weighted_array_sum(w, lambda sl: vals[sl], 1000, chunk=64)
    assert np.array_equal(got, again)


def test_compensated_sum_cancellation():
    vals = [1e16, 1.0, -1e16, 1.0]
    assert compensated_sum(vals) == 2.0


def test_convergence_across_doublings():
    f = lambda z: 1 / (1 + np.abs(z[:, 0]) ** 2)  # noqa: E731
    vals = {Q: integrate(build_grid(1, Q), f).real for Q in (5, 10, 20, 40, 80)}
    diffs = [abs(vals[Q] - vals[2 * Q]) for Q in (5, 10, 20, 40)]
    assert all(b <= a for a, b in zip(diffs, diffs[1:]))


def test_determinism_bitwise():
    g = build_grid(1, 30)
    f = lambda z: np.exp(1j * z[:, 0].real) * np.cos(z[:, 0].imag)  # noqa: E731
    assert integrate(g, f) == integrate(build_grid(1, 30), f)

import json
import math

import numpy as np
import pytest

from fock_qha.quadrature import QuadratureError, build_grid
from fock_qha.symbols import (
    AdmissibilityError,
    SampledFunction,
    check_A2lambda,
    constant_symbol,
    convolve_symbols,
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


def test_heat_kernel_values():
    assert heat_kernel(1.0)(np.array([[0j]]))[0] == pytest.approx(1.0)
    assert heat_kernel(0.5)(np.array([[1j]]))[0] == pytest.approx(2 * math.exp(-2 * math.pi))
    assert heat_kernel(0.5)(np.array([[1j]]))[0] == pytest.approx(0.003735, rel=1e-3)


def test_heat_kernel_two_dimensions():
    val = heat_kernel(2.0, n=2)(np.array([[0.5, 0.5j]]))
    assert val[0] == pytest.approx(0.25 * math.exp(-math.pi * 0.5 / 2))


@pytest.mark.parametrize("xi", [-0.2, -1.9, 0.0, -0.3 + 0.55j])
def test_inadmissible_gaussians_rejected(xi):
    assert not is_admissible(xi)
    with pytest.raises(AdmissibilityError):
        heat_kernel(xi)


@pytest.mark.parametrize("xi", [-2.5, 0.3 + 0.4j, 1j, 3.0])
def test_admissible_gaussians_accepted(xi):
    assert is_admissible(xi)
    assert heat_kernel(xi).is_gaussian


def test_symbol_checks_dimension():
    with pytest.raises(ValueError):
        heat_kernel(1.0, n=2)(np.zeros((3, 1)))


def test_convolve_gaussians_closed_form():
    res = convolve_symbols(heat_kernel(1.0), heat_kernel(1.0), np.array([[0j]]))
    assert res.values[0] == pytest.approx(0.5)
    assert res.meta["route"] == "closed_form"


def test_constant_convolved_with_heat_kernel():
    res = heat_transform(constant_symbol(1.0), 0.7, default_points(1))
    assert np.allclose(res.values, 1.0, atol=1e-13)


def test_radial_polynomial_second_moment():
    for t in (0.25, 1.0, 2.0):
        res = convolve_symbols(radial_polynomial(1), heat_kernel(t), np.array([[0j]]), grid=build_grid(1, 20))
        assert res.values[0].real == pytest.approx(t, rel=1e-12)


def test_heat_transform_gaussian_example():
    res = heat_transform(heat_kernel(0.5), 0.25, np.array([[0j]]))
    assert res.values[0] == pytest.approx(4 / 3)


def test_heat_transform_oscillatory_closed_form():
    pts = default_points(1)
    a = oscillatory_symbol()
    for t in (0.25, 1.0):
        res = heat_transform(a, t, pts, grid=build_grid(1, 64))
        assert np.max(np.abs(res.values - math.exp(-math.pi * t) * a(pts))) < 1e-12


@pytest.mark.parametrize("s", [0.25, 0.5, 1.0, 2.0])
@pytest.mark.parametrize("t", [0.25, 0.5, 1.0, 2.0])
def test_semigroup_by_quadrature(s, t, sample_points):
    res = convolve_symbols(heat_kernel(s), heat_kernel(t), sample_points, grid=build_grid(1, 64), closed_form=False)
    want = heat_kernel(s + t)(sample_points)
    assert np.max(np.abs(res.values - want) / np.abs(want)) < 1e-8


def test_commutativity():
    pts = default_points(1)
    a = smooth_bump()
    g = build_grid(1, 64)
    left = convolve_symbols(a, heat_kernel(0.5), pts, grid=g).values
    right = convolve_symbols(heat_kernel(0.5), a, pts, grid=g).values
    assert np.max(np.abs(left - right)) < 1e-10


def test_quadrature_requires_real_gaussian():
    with pytest.raises(QuadratureError):
        convolve_symbols(smooth_bump(), oscillatory_symbol(), default_points(1))


def test_heat_transform_rejects_nonpositive_time():
    with pytest.raises(ValueError):
        heat_transform(smooth_bump(), 0.0)


def test_approximate_identity():
    a = oscillatory_symbol(np.pi)
    pts = default_points(1)
    errs = [np.max(np.abs(heat_transform(a, t, pts).values - a(pts))) for t in (0.5, 0.25, 0.125)]
    assert errs[0] > errs[1] > errs[2]


def test_heat_transform_symbol_routes():
    g = heat_transform_symbol(heat_kernel(1.0), 0.5)
    assert g.is_gaussian and g.xi == 1.5
    lazy = heat_transform_symbol(oscillatory_symbol(), 0.5, build_grid(1, 40))
    z = np.array([[0.3 + 0.2j], [1.0 + 0j]])
    assert np.allclose(lazy(z), math.exp(-math.pi * 0.5) * oscillatory_symbol()(z), atol=1e-12)


def test_check_A2lambda_examples():
    g = build_grid(1, 40)
    vals = check_A2lambda(constant_symbol(1.0), [[0j], [1.0 + 0j]], g)
    assert vals[0] == pytest.approx(1.0)
    assert vals[1] == pytest.approx(math.exp(math.pi), rel=1e-12)
    xi = 0.3 + 0.4j
    lo = check_A2lambda(heat_kernel(xi), [[0.5j], [1 - 1j]], build_grid(1, 40))
    hi = check_A2lambda(heat_kernel(xi), [[0.5j], [1 - 1j]], build_grid(1, 80))
    assert np.all(np.isfinite(lo))
    assert np.allclose(lo, hi, rtol=1e-6)


@pytest.mark.parametrize("s,p", [(1.0, 1), (2.0, 2), (0.5, 3), (1.5, 1.5)])
def test_lp_norm_matches_closed_form(s, p):
    num = lp_norm(heat_kernel(s), p, scale=s, grid=build_grid(1, 40))
    assert num == pytest.approx(gaussian_lp_norm(s, p), rel=1e-12)
    assert gaussian_lp_norm(s, p) == pytest.approx(s ** ((1 - p) / p) * p ** (-1 / p), rel=1e-14)


def test_gaussian_lp_norm_special_cases():
    assert gaussian_lp_norm(2.0, math.inf) == 0.5
    assert gaussian_lp_norm(-2.5, 2) == math.inf
    assert gaussian_lp_norm(2.0, 2) == pytest.approx(0.5)


def test_sampled_function_serialization():
    pts = default_points(1)[:4]
    sf = SampledFunction(pts, np.arange(4) * (1 + 2j), {"t": 0.5})
    back = SampledFunction.from_json(sf.to_json())
    assert np.array_equal(back.points, sf.points)
    assert np.array_equal(back.values, sf.values)
    assert back.meta == {"t": 0.5}
    lines = sf.to_csv().splitlines()
    assert lines[0] == "re_z1,im_z1,re_value,im_value"
    assert len(lines) == 5
    assert json.loads(sf.to_json())["meta"]["t"] == 0.5


def test_sampled_function_length_check():
    with pytest.raises(ValueError):
        SampledFunction(np.zeros((3, 1)), np.zeros(2))


def test_default_points_shapes():
    assert default_points(1).shape == (121, 1)
    assert default_points(2).shape == (625, 2)

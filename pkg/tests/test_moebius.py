import cmath
import math

import numpy as np
import pytest

from schottkylab.moebius import (
    MoebiusMap,
    PoleError,
    convert,
    distance_to_geodesic,
    hyperbolic_distance,
    image_disc,
    mobius_apply,
    mobius_classify,
    power_derivative,
    to_disc,
    to_halfplane,
    translation_length_from_trace,
)


def _trace_map(t):
    return MoebiusMap.from_array([[t, -1.0], [1.0, 0.0]])


def test_identity_and_diagonal():
    assert mobius_apply(MoebiusMap.identity(), 0.5j) == pytest.approx(0.5j)
    assert mobius_apply(MoebiusMap(2.0, 0.0, 0.0, 0.5), 1j) == pytest.approx(4j)


def test_generic_map_matches_direct_arithmetic():
    z = 1j
    assert mobius_apply(MoebiusMap(1.0, 1.0, 1.0, 2.0), z) == pytest.approx((z + 1) / (z + 2), abs=1e-15)


def test_disc_action_is_cayley_conjugate():
    m = MoebiusMap(1.3, 0.4, -0.2, 0.7).normalized()
    z = 0.3 + 1.7j
    w = mobius_apply(m, to_disc(z), "disc")
    assert w == pytest.approx(to_disc(mobius_apply(m, z)), abs=1e-13)
    assert to_halfplane(to_disc(z)) == pytest.approx(z)
    assert convert(z, "halfplane", "halfplane") == z


def test_classify():
    cls = mobius_classify(_trace_map(2 * math.cosh(1.0)))
    assert cls.kind == "hyperbolic"
    assert cls.translation_length == pytest.approx(2.0, rel=1e-12)
    # independent log form of arccosh
    x = 1.5
    assert mobius_classify(_trace_map(3.0)).translation_length == pytest.approx(2 * math.log(x + math.sqrt(x * x - 1)), rel=1e-13)
    par = mobius_classify(_trace_map(2.0))
    assert par.kind == "parabolic" and par.translation_length is None
    assert mobius_classify(_trace_map(1.0)).kind == "elliptic"
    assert mobius_classify(MoebiusMap.identity()).kind == "identity"


def test_huge_trace_length_is_stable():
    assert translation_length_from_trace(2 * math.cosh(300.0)) == pytest.approx(600.0, rel=1e-14)


def test_distance_basics():
    assert hyperbolic_distance(1j, 1j) == 0.0
    assert hyperbolic_distance(1j, 2j) == pytest.approx(math.log(2.0), rel=1e-14)
    z, w = 0.2 + 0.7j, -1.1 + 0.3j
    assert hyperbolic_distance(to_disc(z), to_disc(w), "disc") == pytest.approx(hyperbolic_distance(z, w), rel=1e-12)


@pytest.mark.parametrize("model", ["halfplane", "disc"])
def test_triangle_inequality(model):
    rng = np.random.default_rng(7)
    if model == "halfplane":
        pts = rng.normal(size=(1000, 3)) + 1j * np.exp(rng.normal(size=(1000, 3)))
    else:
        pts = np.sqrt(rng.uniform(0, 0.98, size=(1000, 3))) * np.exp(2j * np.pi * rng.uniform(size=(1000, 3)))
    x, y, z = pts.T
    d = lambda a, b: hyperbolic_distance(a, b, model)
    assert np.all(d(x, z) <= d(x, y) + d(y, z) + 1e-10)


def test_isometry_invariance():
    m = MoebiusMap(2.0, 1.0, 3.0, 2.0)
    z, w = 0.4 + 0.9j, -0.3 + 2.2j
    assert hyperbolic_distance(m(z), m(w)) == pytest.approx(hyperbolic_distance(z, w), rel=1e-12)


def test_power_derivative():
    m = MoebiusMap(1.0, 1.0, 1.0, 2.0)
    z = 0.3 + 0.8j
    assert power_derivative(m, z, 0.0) == pytest.approx(1.0)
    h = 1e-6
    fd = (m(z + h) - m(z - h)) / (2 * h)
    assert abs(power_derivative(m, z, 1.0) - fd) <= 1e-6 * abs(fd)
    assert power_derivative(m, z, 2.0) == pytest.approx(power_derivative(m, z, 1.0) ** 2, rel=1e-10)
    s = 0.4 + 3j
    assert power_derivative(m, z, s) == pytest.approx(cmath.exp(s * cmath.log(fd)), rel=1e-6)


def test_pole():
    m = MoebiusMap(1.0, 1.0, 1.0, 2.0)
    with pytest.raises(PoleError):
        power_derivative(m, -2.0 + 0j, 1.0)


def test_image_disc_maps_boundary():
    m = MoebiusMap(2.0, 1.0, 1.0, 1.0)
    c, r = 3.0 + 0j, 0.5
    ci, ri = image_disc(m, c, r)
    w = m(c + r * np.exp(1j * np.linspace(0, 2 * np.pi, 50)))
    assert np.allclose(np.abs(w - ci), ri, atol=1e-13)


def test_distance_to_geodesic_against_sampling():
    z = 0.3 + 0.5j
    c, r = 2.0, 1.0
    t = np.linspace(1e-4, np.pi - 1e-4, 200001)
    brute = np.min(hyperbolic_distance(z, c + r * np.exp(1j * t)))
    assert distance_to_geodesic(z, c, r) == pytest.approx(brute, abs=1e-8)
    assert distance_to_geodesic(2.0 + 0.5j, c, r) == 0.0


def test_determinant_must_be_positive():
    with pytest.raises(ValueError):
        MoebiusMap(1.0, 2.0, 3.0, 4.0).normalized()

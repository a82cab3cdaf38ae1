import math
import warnings

import numpy as np
import pytest
from scipy.integrate import quad

from schottkylab.trace_formula import (
    CoverageError,
    IncompleteSpectrumError,
    TestFunction,
    bound_estimate,
    bump,
    bump_hat,
    bump_hat_many,
    cylinder_resonances,
    geodesic_side,
    mean_square_G,
    mean_square_quadrature,
    multiplicity_moments,
    psi_eval,
    psi_many,
    psi_tail,
    resonance_check,
    S_xi,
    trace_cluster_max,
)
from schottkylab.words import length_spectrum

from conftest import integer_group


def test_bump_shape():
    assert bump(0.0) == 1.0 and bump(1.0) == 1.0
    assert bump(2.0) == 0.0 and bump(-2.5) == 0.0
    x = np.linspace(-3, 3, 601)
    assert np.allclose(bump(x), bump(-x))
    assert np.all(np.diff(bump(x[x >= 0])) <= 0)


def test_bump_integral():
    coarse = quad(bump, -2, 2, points=[-1, 1], limit=200, epsabs=1e-13)[0]
    x = np.linspace(-2, 2, 2 * 40000 + 1)
    fine = np.sum((bump(x[1:]) + bump(x[:-1])) * np.diff(x)) / 2
    assert coarse == pytest.approx(3.0, abs=1e-12)
    assert fine == pytest.approx(coarse, abs=1e-9)
    assert psi_eval(TestFunction(0.0, 0.0), 0.0) == pytest.approx(3.0, abs=1e-12)


def test_bump_hat_vectorized_matches_quadrature():
    rng = np.random.default_rng(3)
    w = rng.uniform(-40, 40, 12) + 1j * rng.uniform(-1, 1, 12)
    assert bump_hat_many(w) == pytest.approx(np.array([bump_hat(x) for x in w]), abs=1e-12)


def test_psi_decay_bound():
    """(1 + |a|)^2 |phi_hat(a + i sigma)| <= int |g| + 2 |g'| + |g''|, g = e^{sigma u} phi(u)."""
    sigma, T, xi = 0.3, 5.0, 4.0
    u = np.linspace(-2, 2, 400001)
    h = u[1] - u[0]
    g = np.exp(sigma * u) * bump(u)
    g1, g2 = np.gradient(g, h), np.gradient(np.gradient(g, h), h)
    C2 = float(np.sum(np.abs(g) + 2 * np.abs(g1) + np.abs(g2)) * h)
    x = np.linspace(-150, 150, 3001)
    psi = np.abs(psi_many(TestFunction(xi, T), sigma + 1j * x))
    # the frequency seen by phi_hat is xi - Im(s)
    assert np.all(psi * (1 + np.abs(xi - x)) ** 2 <= 1.01 * C2 * math.exp(sigma * T))


def test_psi_linearity():
    s = 0.2 + 1.3j
    a = psi_eval(TestFunction(1.0, 3.0), s)
    b = psi_eval(TestFunction(1.0, 3.0, scale=2.0), s)
    assert b == pytest.approx(2 * a, rel=1e-14)
    assert psi_many(TestFunction(1.0, 3.0), [s])[0] == pytest.approx(a, rel=1e-12)


def test_geodesic_side_empty_window(sym2):
    assert geodesic_side(sym2, TestFunction(0.0, 1.5)) == 0


def test_geodesic_side_cylinder_closed_form(cyl2):
    ell = 2.0
    for xi, T in ((0.0, 6.0), (1.7, 7.3)):
        expected = sum(
            2 * ell / (1 - math.exp(-k * ell)) * np.exp(-1j * xi * k * ell) * bump(k * ell - T) for k in range(1, 10)
        )
        assert geodesic_side(cyl2, TestFunction(xi, T)) == pytest.approx(expected, abs=1e-13)


def test_geodesic_side_real_positive(sym2, spec2):
    v = geodesic_side(sym2, TestFunction(0.0, 10.0), spec2)
    assert v.imag == 0 and v.real > 0


def test_trace_check_linearity_cylinder(cyl2):
    res = cylinder_resonances(2.0, 0, 250.0)
    r1 = resonance_check(cyl2, TestFunction(0.0, 6.0), -0.25, res, 250.0, delta=0.0, tail_tol=1e-8)
    r2 = resonance_check(cyl2, TestFunction(0.0, 6.0, scale=2.0), -0.25, res, 250.0, delta=0.0, tail_tol=1e-8)
    assert r2.geodesic_side == pytest.approx(2 * r1.geodesic_side, rel=1e-13)
    assert r2.resonance_side == pytest.approx(2 * r1.resonance_side, rel=1e-13)
    assert r1.residual_abs <= r1.bound_estimate + 1e-6
    assert r1.n_resonances == 2 * (2 * int(250 * 2 / (2 * math.pi)) + 1)


def test_coverage_error(cyl2):
    res = cylinder_resonances(2.0, 0, 20.0)
    with pytest.raises(CoverageError):
        resonance_check(cyl2, TestFunction(0.0, 6.0), -0.25, res, 20.0, delta=0.0)


def test_incomplete_spectrum(sym2):
    short = length_spectrum(sym2, 6.0)
    with pytest.raises(IncompleteSpectrumError):
        geodesic_side(sym2, TestFunction(0.0, 10.0), short)


def test_bound_and_tail_consistent():
    tf = TestFunction(0.0, 8.0)
    total = bound_estimate(tf, 0.1, 0.0)
    assert psi_tail(tf, 0.1, -1.0) == pytest.approx(total, rel=1e-12)
    assert psi_tail(tf, 0.1, 300.0) < psi_tail(tf, 0.1, 200.0) < 1e-8 * total


def test_cylinder_resonance_lattice():
    res = cylinder_resonances(2.0, 1, 7.0)
    pts = sorted((s.imag, s.real) for s, _ in res)
    assert len(res) == 2 * 5
    assert all(m == 2 for _, m in res)
    assert any(abs(s - (-1 + math.pi * 1j)) < 1e-14 for s, _ in res)


# mean square


def test_mean_square_positivity(sym2, spec2):
    for sigma, T in ((0.5, 10.0), (0.05, 14.0), (2.0, 12.0)):
        ms = mean_square_G(sym2, sigma, T, spec2)
        assert ms.G >= ms.diagonal > 0


def test_mean_square_small_sigma_limit(sym2, spec2):
    ms = mean_square_G(sym2, 1e-5, 12.0, spec2)
    # lengths in the window are separated by far more than sqrt(sigma)
    assert abs(ms.G - ms.diagonal) <= 1e-9 * ms.diagonal


def test_mean_square_quadrature(sym2, spec2):
    for sigma, T in ((0.5, 9.0), (0.2, 11.0)):
        ms = mean_square_G(sym2, sigma, T, spec2)
        q = mean_square_quadrature(sym2, sigma, T, spec2)
        assert abs(q - ms.G) <= 1e-6 * max(1.0, ms.G)


def test_S_xi_real_at_zero(sym2, spec2):
    assert S_xi(sym2, 0.0, 10.0, spec2).imag == 0
    assert S_xi(sym2, [0.0, 1.0], 10.0, spec2).shape == (2,)


def test_mean_square_rejects_sigma(sym2):
    with pytest.raises(ValueError):
        mean_square_G(sym2, 0.0, 8.0)


# multiplicities


def test_empty_window(sym2, spec2):
    mm = multiplicity_moments(sym2, 1.0, spectrum=spec2)
    assert mm.m_sum == mm.m2_sum == mm.distinct == 0


def test_generic_group_multiplicities():
    """A non-integer group: only orientation doubling, so sum m^2 and distinct grow alike."""
    g = integer_group([(0.13, 3.05), (6.2, 8.9)])
    spec = length_spectrum(g, 16.0)
    ms = spec.multiplicities
    assert np.mean(ms <= 2) > 0.99
    mm = multiplicity_moments(g, 15.0, ladder=np.arange(9.0, 15.01, 0.5), spectrum=spec)
    assert mm.m2_sum <= 2.1 * mm.m_sum
    assert abs(mm.m2_exponent - mm.distinct_exponent) < 0.05


def test_integer_group_cluster_bound():
    g = integer_group([(0, 3), (6, 9), (12, 15)])
    spec = length_spectrum(g, 14.0)
    assert trace_cluster_max(spec) <= 2
    mm = multiplicity_moments(g, 13.0, ladder=np.arange(8.0, 13.01, 0.5), spectrum=spec)
    assert mm.trace_cluster_max == trace_cluster_max(spec)
    assert mm.distinct_exponent <= 0.6

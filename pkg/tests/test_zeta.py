import math
import warnings

import numpy as np
import pytest

from schottkylab.zeta import (
    ConditioningWarning,
    RegionError,
    build_transfer_matrix,
    conjugation_permutation,
    default_order,
    eigenvalue_dimension,
    fredholm_many,
    largest_real_zero,
    leading_eigenvalue,
    transfer_trace,
    zeta_cycle,
    zeta_cycle_many,
    zeta_fredholm,
    zeta_product,
)


def cylinder_zeta(s, ell=2.0, kmax=60):
    return np.prod([(1 - np.exp(-(s + k) * ell)) ** 2 for k in range(kmax)])


def test_cylinder_traces(cyl2):
    s = 0.3 + 1.7j
    for n in range(1, 6):
        expected = 2 * np.exp(-s * n * 2.0) / (1 - np.exp(-n * 2.0))
        assert transfer_trace(cyl2, s, n) == pytest.approx(expected, rel=1e-13)


def test_first_trace_decreases_for_real_s(sym2):
    vals = [transfer_trace(sym2, s, 1).real for s in (1.0, 2.0, 4.0, 8.0)]
    assert all(a > b > 0 for a, b in zip(vals, vals[1:]))


def test_trace_conjugation_symmetry(sym2):
    s = 0.2 + 3.1j
    for n in (1, 2, 3):
        assert transfer_trace(sym2, s.conjugate(), n) == np.conj(transfer_trace(sym2, s, n))


@pytest.mark.parametrize("m", [0, 1, 2])
def test_cycle_vanishes_at_cylinder_zeros(cyl2, m):
    z = zeta_cycle(cyl2, complex(0, math.pi * m), N=40)
    assert abs(z.value) < 1e-8


def test_cycle_matches_cylinder_closed_form(cyl2):
    for s in (0.5 + 0.3j, 0.1 + 2.0j, 1.2):
        assert zeta_cycle(cyl2, s, N=40).value == pytest.approx(cylinder_zeta(s), abs=1e-10)
    # left of the axis the traces grow like e^{n l |Re s|}; the estimate must say so
    z = zeta_cycle(cyl2, -0.4 + 2.0j, N=40)
    assert abs(z.value - cylinder_zeta(-0.4 + 2.0j)) <= z.error_estimate


def test_cycle_vanishes_at_delta(sym2, delta2):
    assert abs(zeta_cycle(sym2, delta2, N=12).value) < 1e-6


def test_cycle_matches_product_in_convergent_region(sym2, delta2):
    for y in (0.0, 3.0, 7.0):
        s = complex(delta2 + 0.5, y)
        c = zeta_cycle(sym2, s, N=14)
        p = zeta_product(sym2, s, delta=delta2)
        assert abs(c.value - p.value) <= c.error_estimate + p.error_estimate


def test_product_limits(sym2, cyl2, delta2):
    assert zeta_product(sym2, 30.0, delta=delta2).value == pytest.approx(1.0, abs=1e-12)
    for s in (0.5 + 1j, 2.0):
        assert zeta_product(cyl2, s, delta=0.0).value == pytest.approx(cylinder_zeta(s), rel=1e-12)
    s = delta2 + 1
    assert abs(zeta_product(sym2, s, delta=delta2).value - zeta_cycle(sym2, s, N=14).value) < 1e-8


def test_product_region_error(sym2, delta2):
    with pytest.raises(RegionError):
        zeta_product(sym2, delta2 + 0.01, delta=delta2)


def test_matrix_trace_converges_to_operator_trace(sym2):
    A = build_transfer_matrix(sym2, 0.0, 24).matrix
    assert abs(np.trace(A) - transfer_trace(sym2, 0.0, 1)) < 1e-8
    for n in (2, 3):
        assert abs(np.trace(np.linalg.matrix_power(A, n)) - transfer_trace(sym2, 0.0, n)) < 1e-8


def test_leading_eigenvalue_crosses_one_at_delta(sym2, delta2):
    assert math.log(abs(leading_eigenvalue(sym2, 0.0))) > 0
    assert abs(math.log(abs(leading_eigenvalue(sym2, delta2)))) < 1e-10
    assert math.log(abs(leading_eigenvalue(sym2, 2 * delta2))) < 0
    from schottkylab.thermo import hausdorff_dimension

    assert abs(hausdorff_dimension(sym2).delta - delta2) < 1e-6


@pytest.mark.parametrize("which", ["sym2", "cyl2"])
def test_matrix_conjugation_symmetry(which, request):
    g = request.getfixturevalue(which)
    M, s = 10, 0.3 + 2j
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConditioningWarning)
        A = build_transfer_matrix(g, s, M).matrix
        B = build_transfer_matrix(g, s.conjugate(), M).matrix
    perm = conjugation_permutation(g)
    idx = np.array([perm[i] * M + k for i in range(g.n_letters) for k in range(M)])
    assert np.abs(B[np.ix_(idx, idx)] - A.conj()).max() < 1e-12


def test_fredholm_cylinder_closed_form(cyl2):
    for s in (0.0 + 0.5j, 0.7 + 2j, -0.6 + 1j, 1j * math.pi):
        assert abs(zeta_fredholm(cyl2, s).value - cylinder_zeta(s)) < 1e-8


def test_fredholm_finite_everywhere(sym2):
    xs, ys = np.meshgrid(np.linspace(-3, 1.5, 10), np.linspace(-8, 8, 10))
    vals = fredholm_many(sym2, (xs + 1j * ys).ravel())
    assert np.all(np.isfinite(vals))


def test_fredholm_agrees_with_cycle_pointwise(sym2, delta2):
    for s in (delta2 + 2j, 0.1 + 6j, 0.6 + 9.5j):
        c, f = zeta_cycle(sym2, s, N=14), zeta_fredholm(sym2, s)
        assert abs(c.value - f.value) <= 3 * (c.error_estimate + f.error_estimate)


def test_vectorized_cycle(sym2):
    s = np.array([0.3 + 1j, 0.5 - 2j])
    vals, errs = zeta_cycle_many(sym2, s, N=12)
    for v, e, x in zip(vals, errs, s):
        single = zeta_cycle(sym2, x, N=12)
        assert v == pytest.approx(single.value, rel=1e-14)
        assert e == pytest.approx(single.error_estimate, rel=1e-12)


def test_largest_real_zero(sym2, delta2):
    assert abs(largest_real_zero(sym2) - delta2) < 1e-9


def test_default_order_and_warning(sym2):
    M = default_order(sym2)
    assert sym2.contraction_ratio ** M < 1e-12
    with pytest.warns(ConditioningWarning):
        zeta_fredholm(sym2, 0.3, M=6)


def test_bad_orders(sym2):
    with pytest.raises(ValueError):
        zeta_cycle(sym2, 0.3, N=1)
    with pytest.raises(ValueError):
        zeta_fredholm(sym2, 0.3, M=2)

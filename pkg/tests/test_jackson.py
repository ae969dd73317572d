from chebsos.jackson import (
    KernelCoefficients,
    KernelSupportError,
    apriori_gap_bound,
    jackson_coefficient,
    kernel_value,
    product_kernel,
    product_kernel_gap,
    smooth,
    smoothing_error,
)
from chebsos.poly import Basis, Poly, coeff_one_norm, multi_indices
from chebsos.utils import estimate_minimum
import numpy as np
import pytest


@pytest.mark.parametrize(
    "k,r,expected",
    [
        (0, 3, 1.0),
        (1, 1, 0.5),
        (1, 2, np.cos(np.pi / 4)),
        (2, 2, 0.25),
        (3, 2, None),
    ],
)
def test_jackson_coefficient(k, r, expected):
    if expected is None:
        with pytest.raises(ValueError):
            jackson_coefficient(k, r)
    else:
        assert jackson_coefficient(k, r) == pytest.approx(expected, abs=1e-15)


def test_jackson_matches_theta_cells():
    assert 1 - jackson_coefficient(1, 1) == pytest.approx(0.5)
    assert 1 - jackson_coefficient(1, 2) == pytest.approx(0.2928932, abs=1e-7)


@pytest.mark.parametrize("r", [1, 2, 5, 10, 20])
def test_coefficients_decrease_and_vanish_past_r(r):
    values = [jackson_coefficient(k, r) for k in range(r + 1)]
    assert all(0 <= v <= 1 for v in values)
    assert all(a >= b for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("r", range(1, 13))
def test_kernel_is_nonnegative(r):
    grid = np.linspace(-1, 1, 101)
    x, y = np.meshgrid(grid, grid)
    assert kernel_value(r, x, y).min() >= -1e-9


def test_coefficient_deviation_bound():
    for r in range(1, 51):
        for k in range(1, r + 1):
            value = jackson_coefficient(k, r)
            assert 0 < value <= 1
            assert 1 - value <= np.pi**2 * k**2 / (r + 2) ** 2 + 1e-15


def test_product_coefficients_within_bernoulli_bound():
    for n in range(1, 4):
        for r in range(1, 21):
            for d in range(1, 5):
                if np.pi * d >= r + 2:
                    continue
                kernel = product_kernel(n, r, d)
                bound = np.pi**2 * d**2 / (r + 2) ** 2
                for alpha in multi_indices(n, d):
                    assert abs(1 - kernel.coefficient(alpha)) <= bound + 1e-15, (n, r, alpha)


def test_product_kernel():
    kernel = product_kernel(2, 2, 4)
    assert kernel.coefficient((0, 0)) == 1.0
    assert kernel.coefficient((1, 1)) == pytest.approx(0.5)
    # alpha_i > r is outside the kernel's degree
    assert kernel.coefficient((3, 0)) == 0.0
    with pytest.raises(KernelSupportError):
        kernel.coefficient((3, 2))


def test_kernel_coefficients_validation():
    with pytest.raises(ValueError):
        KernelCoefficients(nvars=1, degree_cap=2, coverage=2, lambdas={(0,): 0.5})
    with pytest.raises(ValueError):
        KernelCoefficients(nvars=1, degree_cap=2, coverage=2, lambdas={(0,): 1.0, (1,): 1.5})


def test_smooth_preserves_constant_and_scales_terms():
    f = Poly(nvars=1, basis=Basis.CHEBYSHEV, terms={(0,): 2.0, (1,): 1.0, (2,): -1.0})
    smoothed = smooth(f, product_kernel(1, 2, 2))
    assert smoothed.coefficient((0,)) == 2.0
    assert smoothed.coefficient((1,)) == pytest.approx(np.cos(np.pi / 4))
    assert smoothed.coefficient((2,)) == pytest.approx(-0.25)
    assert smoothing_error(f, product_kernel(1, 2, 2)) == pytest.approx(
        1 - np.cos(np.pi / 4) + 0.75
    )


def test_smooth_dimension_mismatch():
    with pytest.raises(ValueError):
        smooth(Poly.term((1, 0)), product_kernel(1, 2, 2))


def test_smoothing_keeps_nonnegative_functions_nonnegative(random_poly, rng):
    f = random_poly(2, 3)
    points = rng.uniform(-1, 1, size=(2000, 2))
    shifted = f - estimate_minimum(f)[0] + 1e-3
    smoothed = smooth(shifted, product_kernel(2, 4, 3))
    assert smoothed(points).min() > -1e-9


@pytest.mark.parametrize(
    "n,d,r,norm,expected",
    [
        (1, 1, 8, 2.0, np.pi**2 / 100 * 2.0),
        (2, 2, 10, 1.0, 4 * np.pi**2 / 144),
        (1, 2, 4, 1.0, None),
        (1, 3, 4, 0.0, 0.0),
    ],
)
def test_apriori_gap_bound(n, d, r, norm, expected):
    bound = apriori_gap_bound(n, d, r, norm)
    if expected is None:
        assert bound is None
    else:
        assert bound == pytest.approx(expected)


def test_smoothing_error_within_apriori_bound(random_poly):
    f = random_poly(1, 3)
    r = 20
    bound = apriori_gap_bound(1, 3, r, coeff_one_norm(f))
    assert smoothing_error(f, product_kernel(1, r, 3)) <= bound


def test_product_kernel_gap():
    assert product_kernel_gap(2, 2, 2) == pytest.approx(0.75)
    assert product_kernel_gap(2, 1, 2) == pytest.approx(1 - np.cos(np.pi / 4))
    assert product_kernel_gap(1, 1, 1) == pytest.approx(0.5)


@pytest.mark.parametrize("n,degree,r", [(1, 4, 6), (2, 3, 4), (3, 2, 3)])
def test_smoothing_error_within_largest_deviation(random_poly, n, degree, r):
    f = random_poly(n, degree)
    kernel = product_kernel(n, r, degree)
    deviation = max(abs(1 - kernel.coefficient(alpha)) for alpha in multi_indices(n, degree))
    assert smoothing_error(f, kernel) <= deviation * coeff_one_norm(f) + 1e-12

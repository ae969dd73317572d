from chebsos.poly import Basis, Poly, multi_indices, parse_polynomial
import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240501)


@pytest.fixture
def random_poly(rng):
    """Factory for random Chebyshev-basis polynomials with coefficients in [-1, 1]."""

    def _make(n: int, degree: int, density: float = 0.7, basis: Basis = Basis.CHEBYSHEV):
        terms = {}
        for alpha in multi_indices(n, degree):
            if rng.random() < density:
                terms[alpha] = float(rng.uniform(-1, 1))
        # Make sure the requested degree is attained
        top = (degree,) + (0,) * (n - 1)
        terms[top] = float(rng.uniform(0.5, 1))
        return Poly(nvars=n, basis=Basis.CHEBYSHEV, terms=terms).to_basis(basis)

    return _make


@pytest.fixture
def motzkin():
    """x1^2 x2^2 (x1^2 + x2^2 - 1) + 1/27, minimum 0 on the square."""
    return parse_polynomial("x1^4*x2^2 + x1^2*x2^4 - x1^2*x2^2 + 1/27")

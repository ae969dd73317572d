from chebsos.poly import (
    Basis,
    BasisError,
    Poly,
    PolynomialParseError,
    _cheb_mul_dense,
    _cheb_mul_sparse,
    _chebyshev_in_powers,
    _convert_dense,
    _convert_sparse,
    _power_in_chebyshev,
    cheb_mul,
    chebyshev_to_monomial,
    coeff_one_norm,
    dump_polynomial,
    evaluate,
    load_polynomial,
    monomial_to_chebyshev,
    multi_indices,
    parse_polynomial,
)
from numpy.polynomial import chebyshev as npcheb
import numpy as np
import pytest


def test_multi_indices_order_and_count():
    assert multi_indices(2, 2) == [
        (0, 0),
        (0, 1),
        (0, 2),
        (1, 0),
        (1, 1),
        (2, 0),
    ]
    # C(n + d, d)
    assert len(multi_indices(3, 4)) == 35


@pytest.mark.parametrize(
    "monomial,chebyshev",
    [
        ({(0,): 1.0}, {(0,): 1.0}),
        ({(1,): 1.0}, {(1,): 1.0}),
        ({(2,): 1.0}, {(0,): 0.5, (2,): 0.5}),
        ({(3,): 1.0}, {(1,): 0.75, (3,): 0.25}),
        ({(4,): 1.0}, {(0,): 0.375, (2,): 0.5, (4,): 0.125}),
    ],
)
def test_monomial_to_chebyshev_powers(monomial, chebyshev):
    converted = monomial_to_chebyshev(Poly(nvars=1, terms=monomial))
    assert converted.basis == Basis.CHEBYSHEV
    assert converted.terms.keys() == chebyshev.keys()
    for alpha, c in chebyshev.items():
        assert converted.terms[alpha] == pytest.approx(c, abs=1e-15)


def test_chebyshev_to_monomial_t3():
    p = chebyshev_to_monomial(Poly.term((3,)))
    assert p.terms == {(1,): -3.0, (3,): 4.0}


def test_conversion_round_trip(random_poly):
    for n, degree in [(1, 9), (2, 6), (3, 4)]:
        p = random_poly(n, degree)
        back = p.to_basis(Basis.MONOMIAL).to_basis(Basis.CHEBYSHEV)
        difference = back - p
        assert all(abs(c) < 1e-12 for c in difference.terms.values())


def test_normalized_chebyshev_scaling():
    p = Poly(nvars=2, basis=Basis.CHEBYSHEV, terms={(1, 1): 1.0, (2, 0): 1.0, (0, 0): 3.0})
    normalized = p.to_basis(Basis.NORMALIZED_CHEBYSHEV)
    assert normalized.terms[(1, 1)] == pytest.approx(0.5)
    assert normalized.terms[(2, 0)] == pytest.approx(1 / np.sqrt(2))
    assert normalized.terms[(0, 0)] == 3.0
    assert normalized.to_basis(Basis.CHEBYSHEV).terms == pytest.approx(p.terms)


def test_small_coefficients_are_dropped():
    p = Poly(nvars=1, terms={(0,): 1.0, (1,): 1e-14})
    assert p.terms == {(0,): 1.0}


def test_invalid_multi_index_rejected():
    with pytest.raises(ValueError):
        Poly(nvars=2, terms={(1,): 1.0})
    with pytest.raises(ValueError):
        Poly(nvars=1, terms={(-1,): 1.0})


def test_dimension_mismatch():
    with pytest.raises(ValueError, match="Dimension mismatch"):
        Poly.term((1,)) + Poly.term((1, 0))


def test_cheb_mul_linearization():
    t2, t3 = Poly.term((2,)), Poly.term((3,))
    assert cheb_mul(t2, t3).terms == {(1,): 0.5, (5,): 0.5}


def test_cheb_mul_needs_chebyshev_basis():
    with pytest.raises(BasisError):
        cheb_mul(Poly(nvars=1, terms={(1,): 1.0}), Poly.term((1,)))


def test_dense_product_matches_sparse(random_poly):
    a = random_poly(2, 5, density=1.0)
    b = random_poly(2, 4, density=1.0)
    difference = _cheb_mul_dense(a, b) - _cheb_mul_sparse(a, b)
    assert all(abs(c) < 1e-12 for c in difference.terms.values())


def test_products_agree_across_bases(random_poly, rng):
    a = random_poly(2, 3)
    b = random_poly(2, 3)
    points = rng.uniform(-1, 1, size=(20, 2))
    expected = a(points) * b(points)
    for basis in Basis:
        product = a.to_basis(basis) * b.to_basis(basis)
        assert product.basis == basis
        np.testing.assert_allclose(product(points), expected, atol=1e-12)


def test_evaluate_matches_numpy(random_poly, rng):
    p = random_poly(1, 7)
    x = rng.uniform(-1, 1, size=15)
    coefficients = [p.coefficient((k,)) for k in range(8)]
    np.testing.assert_allclose(p(x[:, None]), npcheb.chebval(x, coefficients), atol=1e-13)
    assert isinstance(evaluate(p, [0.3]), float)


def test_coeff_one_norm():
    f = Poly(nvars=1, terms={(2,): 3.0, (0,): -1.0})
    assert coeff_one_norm(f, Basis.MONOMIAL) == pytest.approx(4.0)
    assert coeff_one_norm(f, Basis.CHEBYSHEV) == pytest.approx(2.0)
    g = Poly.term((1, 1))
    assert coeff_one_norm(g, Basis.NORMALIZED_CHEBYSHEV) == pytest.approx(0.5)


def test_parse_polynomial():
    p = parse_polynomial("x1^2*x2 - 0.5*x1 + 1")
    assert p.nvars == 2
    assert p.terms == {(0, 0): 1.0, (1, 0): -0.5, (2, 1): 1.0}
    assert parse_polynomial("x").terms == {(1,): 1.0}
    assert parse_polynomial("x2", nvars=3).nvars == 3


@pytest.mark.parametrize("text", ["x0 + 1", "x1 +* 2", "sin(x1)", "x1/x2"])
def test_parse_polynomial_errors(text):
    with pytest.raises(PolynomialParseError):
        parse_polynomial(text)


def test_embed_restrict_partial_evaluate():
    p = Poly.term((2,), 3.0)
    embedded = p.embed(3, 1, "uxy")
    assert embedded.terms == {(0, 2, 0): 3.0}
    assert embedded.restrict([1], "x").terms == p.terms
    q = Poly.term((1, 2))
    # T_2(1) = 1
    assert q.partial_evaluate({1: 1.0}, "x").terms == {(1,): 1.0}
    assert q.partial_evaluate({0: 0.0}, "x").is_zero


def test_json_round_trip(tmp_path, random_poly):
    p = random_poly(2, 3)
    path = tmp_path / "p.json"
    dump_polynomial(p, path)
    loaded = load_polynomial(path)
    assert loaded.nvars == p.nvars
    assert loaded.basis == p.basis
    assert loaded.terms == p.terms


def test_load_text_file(tmp_path):
    path = tmp_path / "f.txt"
    path.write_text("x1^2 - x2\n")
    p = load_polynomial(path)
    assert p.basis == Basis.MONOMIAL
    assert p.terms == {(0, 1): -1.0, (2, 0): 1.0}


@pytest.mark.parametrize(
    "table,source,target",
    [
        (_power_in_chebyshev, Basis.MONOMIAL, Basis.CHEBYSHEV),
        (_chebyshev_in_powers, Basis.CHEBYSHEV, Basis.MONOMIAL),
    ],
)
def test_dense_conversion_matches_sparse(random_poly, table, source, target):
    p = random_poly(3, 8, density=1.0, basis=source)
    dense = _convert_dense(p, table, target)
    sparse = _convert_sparse(p, table, target)
    assert dense.basis == sparse.basis == target
    difference = dense - sparse
    assert all(abs(c) < 1e-10 for c in difference.terms.values())


def test_large_conversions_round_trip(random_poly):
    p = random_poly(3, 10, density=1.0)
    back = monomial_to_chebyshev(chebyshev_to_monomial(p))
    assert all(abs(c) < 1e-9 for c in (back - p).terms.values())


def test_norm_inequalities(random_poly, rng):
    points = rng.uniform(-1, 1, size=(50, 3))
    for _ in range(1000):
        n = int(rng.integers(1, 4))
        degree = int(rng.integers(1, 7))
        f = random_poly(n, degree)
        norm_t = coeff_one_norm(f, Basis.CHEBYSHEV)
        norm_hat = coeff_one_norm(f, Basis.NORMALIZED_CHEBYSHEV)
        assert norm_t <= coeff_one_norm(f, Basis.MONOMIAL) + 1e-9
        assert norm_hat <= norm_t + 1e-12
        assert norm_t <= 2 ** (degree / 2) * norm_hat + 1e-12
        assert np.abs(f(points[:, :n])).max() <= norm_t + 1e-9

from chebsos.certificates import (
    Certificate,
    CertificateError,
    ChebyshevKind,
    Generator,
    SquareTerm,
    Summand,
    chebyshev_family,
    decompose_multi,
    decompose_univariate,
    dump_certificate,
    expand,
    load_certificate,
    norm_gap_certificate,
    shift_certificate,
    verify,
)
from chebsos.poly import Basis, Poly, coeff_one_norm
import json
import numpy as np
import pytest


@pytest.mark.parametrize("k", range(1, 9))
@pytest.mark.parametrize("sign", [1, -1])
def test_univariate_identities(k, sign):
    cert = decompose_univariate(k, sign)
    assert verify(cert) < 1e-12
    assert cert.degree <= k
    assert cert.target.terms == {(0,): 1.0, (k,): float(sign)}


def test_univariate_invalid_arguments():
    with pytest.raises(ValueError):
        decompose_univariate(0, 1)
    with pytest.raises(ValueError):
        decompose_univariate(2, 0)


@pytest.mark.parametrize(
    "kind,m,terms",
    [
        (ChebyshevKind.FIRST, 3, {(1,): -3.0, (3,): 4.0}),
        (ChebyshevKind.SECOND, 2, {(0,): -1.0, (2,): 4.0}),
        (ChebyshevKind.THIRD, 1, {(0,): -1.0, (1,): 2.0}),
        (ChebyshevKind.FOURTH, 2, {(0,): -1.0, (1,): 2.0, (2,): 4.0}),
        (ChebyshevKind.SECOND, 0, {(0,): 1.0}),
    ],
)
def test_chebyshev_family(kind, m, terms):
    assert chebyshev_family(kind, m).terms == terms


def test_chebyshev_family_trigonometric_forms():
    theta = np.linspace(0.1, 3.0, 17)
    x = np.cos(theta)[:, None]
    m = 4
    np.testing.assert_allclose(
        chebyshev_family(ChebyshevKind.SECOND, m)(x), np.sin((m + 1) * theta) / np.sin(theta)
    )
    np.testing.assert_allclose(
        chebyshev_family(ChebyshevKind.THIRD, m)(x),
        np.cos((m + 0.5) * theta) / np.cos(theta / 2),
    )
    np.testing.assert_allclose(
        chebyshev_family(ChebyshevKind.FOURTH, m)(x),
        np.sin((m + 0.5) * theta) / np.sin(theta / 2),
    )


def test_decompose_multi_random(rng):
    for _ in range(200):
        n = int(rng.integers(1, 5))
        alpha = tuple(int(a) for a in rng.integers(0, 3, size=n))
        if not any(alpha):
            alpha = (1,) + alpha[1:]
        for sign in (1, -1):
            cert = decompose_multi(alpha, sign)
            assert verify(cert) < 1e-9
            assert cert.degree <= sum(alpha)
            assert all(s.origin == alpha for s in cert.summands)


def test_decompose_multi_product_identities():
    # 1 - T_1(x1) T_1(x2) = ((1 + x1)(1 - x2) + (1 - x1)(1 + x2)) / 2
    cert = decompose_multi((1, 1), -1)
    generators = sorted(
        tuple((g.index, g.sign) for g in s.generators) for s in cert.summands
    )
    assert generators == [((0, -1), (1, 1)), ((0, 1), (1, -1))]
    assert all(t.weight == pytest.approx(0.5) for s in cert.summands for t in s.sos)
    assert verify(cert) < 1e-14


def test_decompose_multi_rejects_zero_index():
    with pytest.raises(ValueError):
        decompose_multi((0, 0), 1)


def test_norm_gap_certificate_random(random_poly):
    for n, degree in [(1, 6), (2, 4), (3, 3)]:
        p = random_poly(n, degree)
        cert = norm_gap_certificate(p)
        assert verify(cert) < 1e-9
        assert cert.degree <= degree
        # target + p is the constant ||p||_{1,T}
        total = cert.target + p
        assert list(total.terms) == [(0,) * n]
        assert total.terms[(0,) * n] == pytest.approx(coeff_one_norm(p))


def test_norm_gap_of_monomial_input(random_poly):
    p = random_poly(2, 3, basis=Basis.MONOMIAL)
    assert verify(norm_gap_certificate(p)) < 1e-9


def test_norm_gap_of_constants():
    positive = norm_gap_certificate(Poly.constant(2.0, 2))
    assert positive.target.is_zero
    assert positive.summands == ()
    assert verify(positive) == 0.0

    negative = norm_gap_certificate(Poly.constant(-1.5, 1))
    assert negative.target.terms == {(0,): 3.0}
    assert len(negative.summands) == 1
    assert negative.summands[0].sos[0].weight == pytest.approx(3.0)
    assert verify(negative) < 1e-15


def test_shift_certificate(random_poly):
    cert_p = decompose_multi((1, 2), 1)
    p = cert_p.target
    f = random_poly(2, 3)
    shifted = shift_certificate(f, p, cert_p)
    assert verify(shifted) < 1e-9
    expected = f + coeff_one_norm(p - f)
    difference = shifted.target - expected
    assert all(abs(c) < 1e-12 for c in difference.terms.values())


def test_shift_certificate_errors(random_poly):
    cert_p = decompose_multi((1, 2), 1)
    p = cert_p.target
    with pytest.raises(CertificateError, match="Degree violation"):
        shift_certificate(random_poly(2, 4), p, cert_p)
    with pytest.raises(CertificateError):
        shift_certificate(random_poly(2, 2), p + 1.0, cert_p)


def test_json_round_trip(tmp_path):
    cert = norm_gap_certificate(Poly(nvars=2, basis=Basis.CHEBYSHEV, terms={(1, 1): 0.5, (2, 0): -1.0}))
    path = tmp_path / "cert.json"
    dump_certificate(cert, path)
    payload = json.loads(path.read_text())
    assert "I" in payload["summands"][0]
    loaded = load_certificate(path)
    assert loaded.degree_cap == cert.degree_cap
    assert len(loaded.summands) == len(cert.summands)
    assert verify(loaded) < 1e-12


def test_corrupted_certificate_has_residual(tmp_path):
    cert = decompose_multi((2, 1), -1)
    path = tmp_path / "cert.json"
    dump_certificate(cert, path)
    payload = json.loads(path.read_text())
    payload["summands"][0]["sos"][0]["w"] *= 2
    path.write_text(json.dumps(payload))
    assert verify(load_certificate(path)) > 1e-3


def test_expand_matches_target_values(rng):
    cert = decompose_univariate(5, 1)
    x = rng.uniform(-1, 1, size=(25, 1))
    np.testing.assert_allclose(expand(cert)(x), 1 + np.cos(5 * np.arccos(x[:, 0])), atol=1e-12)


def test_generator_validation():
    assert Generator(i=2, sign=-1).index == 2
    with pytest.raises(ValueError):
        Generator(index=0, sign=2)
    with pytest.raises(ValueError):
        Generator(index=-1, sign=1)
    with pytest.raises(ValueError):
        Summand(generators=(Generator(index=0, sign=1), Generator(index=0, sign=1)))


def test_certificate_validation():
    one = Poly.constant(1.0, 1)
    with pytest.raises(ValueError):
        Certificate(
            target=one,
            summands=(Summand(generators=(Generator(index=1, sign=1),), sos=(SquareTerm(weight=1.0, q=one),)),),
            degree_cap=2,
        )
    with pytest.raises(ValueError, match="Degree bookkeeping"):
        Certificate(
            target=decompose_univariate(4, 1).target,
            summands=decompose_univariate(4, 1).summands,
            degree_cap=3,
        )
    with pytest.raises(ValueError):
        SquareTerm(weight=-1.0, q=one)


def test_scaled_and_combine():
    a = decompose_univariate(2, 1)
    b = decompose_univariate(3, -1)
    combined = Certificate.combine([a.scaled(2.0), b])
    assert verify(combined) < 1e-12
    assert combined.degree_cap == 3
    with pytest.raises(ValueError):
        a.scaled(-1.0)


def _poly_json(terms):
    return {
        "nvars": 2,
        "basis": "monomial",
        "terms": [{"alpha": alpha, "c": c} for alpha, c in terms],
    }


HAND_WRITTEN_CERTIFICATE = {
    # 2 - x1^2 - x1 x2 = (1 - x1)(1 + x1) + ((1 + x1)(1 - x2) + (1 - x1)(1 + x2)) / 2
    "target": _poly_json([([0, 0], 2.0), ([2, 0], -1.0), ([1, 1], -1.0)]),
    "summands": [
        {
            "I": [{"i": 0, "sign": -1}, {"i": 0, "sign": 1}],
            "sos": [{"w": 1.0, "q": _poly_json([([0, 0], 1.0)])}],
        },
        {
            "I": [{"i": 0, "sign": 1}, {"i": 1, "sign": -1}],
            "sos": [{"w": 0.5, "q": _poly_json([([0, 0], 1.0)])}],
        },
        {
            "I": [{"i": 0, "sign": -1}, {"i": 1, "sign": 1}],
            "sos": [{"w": 0.5, "q": _poly_json([([0, 0], 1.0)])}],
        },
    ],
}


def test_load_hand_written_certificate(tmp_path):
    path = tmp_path / "cert.json"
    path.write_text(json.dumps(HAND_WRITTEN_CERTIFICATE))
    cert = load_certificate(path)
    assert cert.degree_cap == 2
    assert cert.group_degree_caps is None
    assert verify(cert) < 1e-15


def test_degree_cap_defaults_to_used_degree():
    cert = decompose_univariate(4, 1)
    assert Certificate(target=cert.target, summands=cert.summands).degree_cap == cert.degree
    assert Certificate(target=Poly.zero(1)).degree_cap == 0


@pytest.mark.parametrize("n,degree", [(1, 7), (2, 4), (3, 3)])
def test_norm_gap_is_nonnegative_on_grid(random_poly, n, degree):
    p = random_poly(n, degree)
    cert = norm_gap_certificate(p)
    axis = np.linspace(-1, 1, {1: 401, 2: 61, 3: 17}[n])
    points = np.stack(np.meshgrid(*[axis] * n), axis=-1).reshape(-1, n)
    assert cert.target(points).min() >= -1e-9
    np.testing.assert_allclose(expand(cert)(points), cert.target(points), atol=1e-9)

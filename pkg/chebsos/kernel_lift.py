"""Lifting polynomials in u to kernels in (x, y) and carrying certificates along.

For p = sum p_alpha T_alpha(u) the lifted kernel is

    K_p(x, y) = sum p_alpha T_alpha(x) T_alpha(y),

obtained variable by variable with the substitution u_i -> x_i y_i + s,
s^2 = (1 - x_i^2)(1 - y_i^2), keeping the part that is even in s. Working
polynomials live in the mixed group ``"uxy"`` with 3n variables: u_i is
variable i, x_i is n + i and y_i is 2n + i. Results are returned in the group
``"xy"``: x_i is variable i and y_i is n + i.
"""
from chebsos.certificates import (
    Certificate,
    CertificateError,
    Generator,
    SquareTerm,
    Summand,
    verify,
)
from chebsos.poly import Basis, MultiIndex, Poly
from pydantic import BaseModel, ConfigDict
from typing import Dict, List, NamedTuple, Tuple
import logging

logger = logging.getLogger(__name__)

MIXED_GROUP = "uxy"
LIFTED_GROUP = "xy"

# Input certificates must verify to this residual before they are lifted
LIFT_RESIDUAL_TOLERANCE = 1e-9


class SplitResult(BaseModel):
    """q(..., x_i y_i + s, ...) = q0 + s * q1 with s^2 = (1 - x_i^2)(1 - y_i^2)."""

    model_config = ConfigDict(frozen=True)

    q0: Poly
    q1: Poly


def _as_mixed(q: Poly) -> Poly:
    q = q.to_basis(Basis.MONOMIAL)
    if q.var_group == MIXED_GROUP:
        return q
    if len(q.var_group) != 1:
        raise ValueError(
            f"Expected a single variable group or '{MIXED_GROUP}', got '{q.var_group}'."
        )
    return q.embed(3 * q.nvars, 0, MIXED_GROUP)


def _mixed_monomial(n: int, exponents: Dict[int, int], c: float = 1.0) -> Poly:
    alpha = tuple(exponents.get(k, 0) for k in range(3 * n))
    return Poly.from_terms({alpha: c}, 3 * n, Basis.MONOMIAL, MIXED_GROUP)


def _substitution_powers(n: int, i: int, k_max: int) -> List[Tuple[Poly, Poly]]:
    """(A_k, B_k) with (x_i y_i + s)^k = A_k + s B_k."""
    xy = _mixed_monomial(n, {n + i: 1, 2 * n + i: 1})
    one = Poly.constant(1.0, 3 * n, Basis.MONOMIAL, MIXED_GROUP)
    x2 = _mixed_monomial(n, {n + i: 2})
    y2 = _mixed_monomial(n, {2 * n + i: 2})
    radical_square = (one - x2) * (one - y2)
    powers = [(one, Poly.zero(3 * n, Basis.MONOMIAL, MIXED_GROUP))]
    for _ in range(k_max):
        a, b = powers[-1]
        powers.append((a * xy + b * radical_square, a + b * xy))
    return powers


def split(q: Poly, i: int) -> SplitResult:
    """Substitute u_i -> x_i y_i + s and separate the s-free and s-linear parts.

    Parameters
    ----------
    q : Poly
        Polynomial in a single variable group (read as u) or in ``"uxy"``.
    i : int
        Index of the u variable to eliminate.

    Returns
    -------
    SplitResult in the group ``"uxy"``.

    Examples
    --------
    >>> parts = split(Poly(nvars=1, terms={(1,): 1.0}), 0)
    >>> parts.q0.terms, parts.q1.terms
    ({(0, 1, 1): 1.0}, {(0, 0, 0): 1.0})

    """
    q = _as_mixed(q)
    n = q.nvars // 3
    if not 0 <= i < n:
        raise ValueError(f"Variable index {i} out of range for n={n}.")
    by_power: Dict[int, Dict[MultiIndex, float]] = {}
    for alpha, c in q.terms.items():
        rest = alpha[:i] + (0,) + alpha[i + 1 :]
        by_power.setdefault(alpha[i], {})[rest] = c
    powers = _substitution_powers(n, i, max(by_power, default=0))
    q0 = Poly.zero(3 * n, Basis.MONOMIAL, MIXED_GROUP)
    q1 = Poly.zero(3 * n, Basis.MONOMIAL, MIXED_GROUP)
    for k, terms in by_power.items():
        rest = Poly.from_terms(terms, 3 * n, Basis.MONOMIAL, MIXED_GROUP)
        a, b = powers[k]
        q0 = q0 + rest * a
        q1 = q1 + rest * b
    return SplitResult(q0=q0, q1=q1)


def kappa(q: Poly, i: int) -> Poly:
    """The even part of the substitution u_i -> x_i y_i + s."""
    return split(q, i).q0


def _to_lifted(q: Poly) -> Poly:
    n = q.nvars // 3
    return q.restrict(range(n, 3 * n), LIFTED_GROUP)


def lift_polynomial(p: Poly) -> Poly:
    """K_p(x, y) = sum p_alpha T_alpha(x) T_alpha(y) through iterated kappa.

    The result is in the group ``"xy"`` and in the basis of ``p``.
    """
    basis = p.basis
    lifted = _as_mixed(p)
    for i in range(p.nvars):
        lifted = kappa(lifted, i)
    return _to_lifted(lifted).to_basis(basis)


def lift_direct(p: Poly) -> Poly:
    """Chebyshev coefficients of K_p read off directly: T_alpha -> T_(alpha, alpha)."""
    pc = p.to_basis(Basis.CHEBYSHEV)
    terms = {alpha + alpha: c for alpha, c in pc.terms.items()}
    return Poly.from_terms(terms, 2 * p.nvars, Basis.CHEBYSHEV, LIFTED_GROUP)


def back_map(kernel: Poly, var_group: str = "x") -> Poly:
    """p_K(t) = K(t, 1)."""
    if kernel.nvars % 2 or len(kernel.var_group) != 2:
        raise ValueError(f"Expected a kernel in two variable groups, got '{kernel.var_group}'.")
    n = kernel.nvars // 2
    return kernel.partial_evaluate({n + i: 1.0 for i in range(n)}, var_group)


class _Piece(NamedTuple):
    weight: float
    q: Poly
    generators: Tuple[Generator, ...]


def _lift_piece(piece: _Piece, signs: frozenset, n: int, i: int) -> List[_Piece]:
    """Eliminate u_i from w q^2 prod_{sign in signs} (1 + sign u_i)."""
    parts = split(piece.q, i)
    q0, q1 = parts.q0, parts.q1
    one = Poly.constant(1.0, 3 * n, Basis.MONOMIAL, MIXED_GROUP)
    x = _mixed_monomial(n, {n + i: 1})
    y = _mixed_monomial(n, {2 * n + i: 1})
    x_minus, x_plus = Generator(index=i, sign=-1), Generator(index=i, sign=1)
    y_minus, y_plus = Generator(index=n + i, sign=-1), Generator(index=n + i, sign=1)
    w, gens = piece.weight, piece.generators
    if not signs:
        lifted = [
            (w, q0, ()),
            (w, q1, (x_minus, x_plus, y_minus, y_plus)),
        ]
    elif signs == {-1}:
        lifted = [
            (w / 2, q0 - (one + x) * (one - y) * q1, (x_minus, y_plus)),
            (w / 2, q0 - (one - x) * (one + y) * q1, (x_plus, y_minus)),
        ]
    elif signs == {1}:
        lifted = [
            (w / 2, q0 + (one - x) * (one - y) * q1, (x_plus, y_plus)),
            (w / 2, q0 + (one + x) * (one + y) * q1, (x_minus, y_minus)),
        ]
    else:
        lifted = [
            (w, x * q0 - y * (one - x * x) * q1, (y_minus, y_plus)),
            (w, y * q0 - x * (one - y * y) * q1, (x_minus, x_plus)),
        ]
    return [
        _Piece(weight, q, gens + extra)
        for weight, q, extra in lifted
        if not q.is_zero and weight > 0
    ]


def lift_certificate(cert: Certificate) -> Certificate:
    """Lift a certificate for p in T(1 +- u)_r to one for K_p in T(1 +- x; 1 +- y)_(r, r).

    Each square is processed one variable at a time; the generators of its
    summand on u_i decide which of the four identities replaces them.

    Raises
    ------
    CertificateError
        The input certificate does not verify or is not in a single variable group.

    """
    if len(cert.target.var_group) != 1:
        raise CertificateError("Only certificates in a single variable group can be lifted.")
    residual = verify(cert)
    if residual >= LIFT_RESIDUAL_TOLERANCE:
        raise CertificateError(f"Input certificate does not verify (residual {residual:.3e}).")
    n, r = cert.nvars, cert.degree_cap
    grouped: Dict[Tuple[Generator, ...], List[SquareTerm]] = {}
    for summand in cert.summands:
        signs = [
            frozenset(g.sign for g in summand.generators if g.index == i)
            for i in range(n)
        ]
        for term in summand.sos:
            pieces = [_Piece(term.weight, _as_mixed(term.q), ())]
            for i in range(n):
                pieces = [
                    lifted
                    for piece in pieces
                    for lifted in _lift_piece(piece, signs[i], n, i)
                ]
            for piece in pieces:
                key = tuple(sorted(piece.generators, key=lambda g: (g.index, g.sign)))
                grouped.setdefault(key, []).append(
                    SquareTerm(weight=piece.weight, q=_to_lifted(piece.q))
                )
    summands = tuple(
        Summand(generators=gens, sos=tuple(terms)) for gens, terms in grouped.items()
    )
    target = lift_polynomial(cert.target).to_basis(Basis.CHEBYSHEV)
    logger.debug(
        f"Lifted {len(cert.summands)} summands on {n} variables into {len(summands)} summands"
    )
    return Certificate(
        target=target,
        summands=summands,
        degree_cap=2 * r,
        group_degree_caps=(r, r),
    )

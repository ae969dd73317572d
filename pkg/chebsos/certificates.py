"""Explicit memberships in the truncated pre-ordering T(1 +- x_1, ..., 1 +- x_n)_r.

A :class:`Certificate` writes its ``target`` as

    sum over summands of (sum_k w_k q_k^2) * prod_{g in I} g

with every generator g = 1 + sign * x_i of degree one. The constructions here
are closed form: univariate leaves use the Chebyshev families of the four kinds
and multivariate terms are assembled with

    1 + ab = ((1 + a)(1 + b) + (1 - a)(1 - b)) / 2
    1 - ab = ((1 + a)(1 - b) + (1 - a)(1 + b)) / 2
"""
from chebsos.poly import (
    Basis,
    MultiIndex,
    Poly,
    cheb_mul,
    coeff_one_norm,
    total_degree,
)
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from enum import Enum
from functools import lru_cache
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union
import logging

logger = logging.getLogger(__name__)


class CertificateError(Exception):
    """A certificate is invalid or cannot be built for the given input."""

    pass


class ChebyshevKind(str, Enum):
    FIRST = "T"
    SECOND = "U"
    THIRD = "V"
    FOURTH = "W"


# Degree-one members of each family; all share P_{m+1} = 2x P_m - P_{m-1}, P_0 = 1
_FIRST_TERMS = {
    ChebyshevKind.FIRST: {(1,): 1.0},
    ChebyshevKind.SECOND: {(1,): 2.0},
    ChebyshevKind.THIRD: {(1,): 2.0, (0,): -1.0},
    ChebyshevKind.FOURTH: {(1,): 2.0, (0,): 1.0},
}


@lru_cache(maxsize=None)
def chebyshev_family(kind: ChebyshevKind, m: int) -> Poly:
    """Univariate Chebyshev polynomial of the given kind and degree, monomial basis.

    Examples
    --------
    >>> chebyshev_family(ChebyshevKind.FOURTH, 1).terms
    {(0,): 1.0, (1,): 2.0}

    """
    kind = ChebyshevKind(kind)
    if m < 0:
        raise ValueError(f"Degree must be non-negative, got {m}.")
    previous = Poly.constant(1.0, 1)
    if m == 0:
        return previous
    current = Poly.from_terms(_FIRST_TERMS[kind], 1)
    two_x = Poly.from_terms({(1,): 2.0}, 1)
    for _ in range(m - 1):
        previous, current = current, two_x * current - previous
    return current


class Generator(BaseModel):
    """The degree-one generator 1 + sign * x_index."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    index: int = Field(ge=0, alias="i")
    sign: int

    @field_validator("sign")
    @classmethod
    def _check_sign(cls, sign: int) -> int:
        if sign not in (1, -1):
            raise ValueError(f"Generator sign must be +1 or -1, got {sign}.")
        return sign

    def to_poly(self, nvars: int, var_group: str = "x") -> Poly:
        """1 + sign * x_index in the Chebyshev basis."""
        alpha = tuple(1 if k == self.index else 0 for k in range(nvars))
        return Poly.from_terms(
            {(0,) * nvars: 1.0, alpha: float(self.sign)},
            nvars,
            Basis.CHEBYSHEV,
            var_group,
        )


class SquareTerm(BaseModel):
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    weight: float = Field(ge=0, alias="w")
    q: Poly


class Summand(BaseModel):
    """(sum_k w_k q_k^2) * prod_{g in generators} g."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    generators: Tuple[Generator, ...] = Field(default=(), alias="I")
    sos: Tuple[SquareTerm, ...] = ()
    origin: Optional[MultiIndex] = None
    """Chebyshev term whose branch produced this summand, if any"""

    @field_validator("generators")
    @classmethod
    def _canonical_generators(cls, generators: Tuple[Generator, ...]):
        ordered = tuple(sorted(set(generators), key=lambda g: (g.index, g.sign)))
        if len(ordered) != len(generators):
            raise ValueError("Generator subsets must not repeat a generator.")
        return ordered

    def generator_poly(self, nvars: int, var_group: str = "x") -> Poly:
        result = Poly.constant(1.0, nvars, Basis.CHEBYSHEV, var_group)
        for g in self.generators:
            result = cheb_mul(result, g.to_poly(nvars, var_group))
        return result

    def scaled(self, c: float) -> "Summand":
        sos = tuple(SquareTerm(weight=t.weight * c, q=t.q) for t in self.sos)
        return self.model_copy(update={"sos": sos})


class Certificate(BaseModel):
    """A decomposition of ``target`` in a truncated pre-ordering.

    Parameters
    ----------
    target : Poly
        The certified polynomial.
    summands : tuple of Summand
        Generator subsets with their weighted sums of squares.
    degree_cap : int, optional
        Total degree cap r: |I| + 2 deg q <= r for every square. Defaults to
        the largest degree the summands use.
    group_degree_caps : tuple of int, optional
        Per-label caps when ``target`` lives in a mixed variable group, e.g.
        (r, r) for certificates over (x, y).

    """

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    target: Poly
    summands: Tuple[Summand, ...] = ()
    degree_cap: Optional[int] = Field(default=None, ge=0)
    group_degree_caps: Optional[Tuple[int, ...]] = None

    @model_validator(mode="after")
    def _check_consistency(self):
        if self.degree_cap is None:
            object.__setattr__(self, "degree_cap", self.degree)
        nvars, group = self.target.nvars, self.target.var_group
        for summand in self.summands:
            for g in summand.generators:
                if g.index >= nvars:
                    raise ValueError(f"Generator on x_{g.index} outside {nvars} variables.")
            for term in summand.sos:
                if term.q.nvars != nvars or term.q.var_group != group:
                    raise ValueError("Squared polynomials must share the target's variables.")
        if self.group_degree_caps is not None and len(self.group_degree_caps) != len(group):
            raise ValueError(
                f"Expected {len(group)} group degree caps for group '{group}'."
            )
        violations = self.degree_violations()
        if violations:
            raise ValueError("Degree bookkeeping violated: " + "; ".join(violations))
        return self

    @property
    def nvars(self) -> int:
        return self.target.nvars

    @property
    def degree(self) -> int:
        """Largest |I| + 2 deg q over all squares."""
        return max(
            (
                len(summand.generators) + 2 * term.q.degree
                for summand in self.summands
                for term in summand.sos
            ),
            default=0,
        )

    def degree_violations(self) -> List[str]:
        violations = []
        caps = self.group_degree_caps
        for summand in self.summands:
            for term in summand.sos:
                used = len(summand.generators) + 2 * term.q.degree
                if used > self.degree_cap:
                    violations.append(
                        f"|I|={len(summand.generators)} with deg q={term.q.degree} exceeds {self.degree_cap}"
                    )
                if caps is None:
                    continue
                for position, cap in enumerate(caps):
                    indices = self.target.group_indices(position)
                    in_group = sum(1 for g in summand.generators if g.index in indices)
                    used = in_group + 2 * term.q.degree_in(indices)
                    if used > cap:
                        violations.append(
                            f"degree {used} in group '{self.target.var_group[position]}' exceeds {cap}"
                        )
        return violations

    def scaled(self, c: float) -> "Certificate":
        """Certificate for c * target, c >= 0."""
        if c < 0:
            raise ValueError("Certificates can only be scaled by non-negative numbers.")
        return self.model_copy(
            update={
                "target": self.target * c,
                "summands": tuple(s.scaled(c) for s in self.summands),
            }
        )

    @classmethod
    def combine(
        cls, certificates: Sequence["Certificate"], target: Optional[Poly] = None
    ) -> "Certificate":
        """Certificate for the sum of the targets; summands are concatenated in order."""
        if not certificates:
            raise ValueError("Nothing to combine.")
        if target is None:
            target = certificates[0].target
            for cert in certificates[1:]:
                target = target + cert.target
        return cls(
            target=target,
            summands=tuple(s for cert in certificates for s in cert.summands),
            degree_cap=max(cert.degree_cap for cert in certificates),
            group_degree_caps=certificates[0].group_degree_caps,
        )


def expand(cert: Certificate) -> Poly:
    """Chebyshev-basis expansion of all summands."""
    nvars, group = cert.target.nvars, cert.target.var_group
    total = Poly.zero(nvars, Basis.CHEBYSHEV, group)
    for summand in cert.summands:
        sigma = Poly.zero(nvars, Basis.CHEBYSHEV, group)
        for term in summand.sos:
            q = term.q.to_basis(Basis.CHEBYSHEV)
            sigma = sigma + cheb_mul(q, q) * term.weight
        total = total + cheb_mul(sigma, summand.generator_poly(nvars, group))
    return total


def verify(cert: Certificate) -> float:
    """Largest absolute Chebyshev coefficient of expand(cert) - target.

    Examples
    --------
    >>> verify(decompose_univariate(3, -1)) < 1e-12
    True

    """
    difference = expand(cert) - cert.target.to_basis(Basis.CHEBYSHEV)
    residual = max((abs(c) for c in difference.terms.values()), default=0.0)
    logger.debug(f"Certificate with {len(cert.summands)} summands: residual {residual:.3e}")
    return residual


def _check_sign(sign: int):
    if sign not in (1, -1):
        raise ValueError(f"Sign must be +1 or -1, got {sign}.")


def decompose_univariate(k: int, sign: int) -> Certificate:
    """Closed-form certificate of 1 + sign * T_k in T(1 - x, 1 + x)_k.

    Notes
    -----
    With m = k // 2 and U, V, W the Chebyshev polynomials of the second,
    third and fourth kind:

    - 1 - T_{2m}   = 2 (1 - x)(1 + x) U_{m-1}^2
    - 1 + T_{2m}   = 2 T_m^2
    - 1 - T_{2m+1} = (1 - x) W_m^2
    - 1 + T_{2m+1} = (1 + x) V_m^2

    """
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}.")
    _check_sign(sign)
    m, odd = divmod(k, 2)
    if not odd and sign < 0:
        generators = (Generator(index=0, sign=-1), Generator(index=0, sign=1))
        weight, q = 2.0, chebyshev_family(ChebyshevKind.SECOND, m - 1)
    elif not odd:
        generators, weight, q = (), 2.0, chebyshev_family(ChebyshevKind.FIRST, m)
    elif sign < 0:
        generators = (Generator(index=0, sign=-1),)
        weight, q = 1.0, chebyshev_family(ChebyshevKind.FOURTH, m)
    else:
        generators = (Generator(index=0, sign=1),)
        weight, q = 1.0, chebyshev_family(ChebyshevKind.THIRD, m)
    target = Poly.from_terms({(0,): 1.0, (k,): float(sign)}, 1, Basis.CHEBYSHEV)
    summand = Summand(
        generators=generators, sos=(SquareTerm(weight=weight, q=q),), origin=(k,)
    )
    return Certificate(target=target, summands=(summand,), degree_cap=k)


def _relocate(cert: Certificate, nvars: int, offset: int, var_group: str) -> Certificate:
    summands = tuple(
        Summand(
            generators=tuple(
                Generator(index=g.index + offset, sign=g.sign) for g in s.generators
            ),
            sos=tuple(
                SquareTerm(weight=t.weight, q=t.q.embed(nvars, offset, var_group))
                for t in s.sos
            ),
        )
        for s in cert.summands
    )
    return Certificate(
        target=cert.target.embed(nvars, offset, var_group),
        summands=summands,
        degree_cap=cert.degree_cap,
    )


def _disjoint_product(a: Certificate, b: Certificate) -> Certificate:
    """Certificate for a.target * b.target when the two use disjoint variables."""
    summands = []
    for sa in a.summands:
        for sb in b.summands:
            sos = tuple(
                SquareTerm(weight=ta.weight * tb.weight, q=ta.q * tb.q)
                for ta in sa.sos
                for tb in sb.sos
            )
            summands.append(Summand(generators=sa.generators + sb.generators, sos=sos))
    return Certificate(
        target=a.target.to_basis(Basis.CHEBYSHEV) * b.target.to_basis(Basis.CHEBYSHEV),
        summands=tuple(summands),
        degree_cap=a.degree_cap + b.degree_cap,
    )


def _decompose(alpha: MultiIndex, sign: int, var_group: str) -> Certificate:
    n = len(alpha)
    support = [i for i, a in enumerate(alpha) if a]
    first = support[0]
    leaf = lambda s: _relocate(decompose_univariate(alpha[first], s), n, first, var_group)
    if len(support) == 1:
        return leaf(sign)
    rest = tuple(0 if i == first else a for i, a in enumerate(alpha))
    # a = T_{alpha_first}(x_first), b = T_rest
    pairs = [(1, 1), (-1, -1)] if sign > 0 else [(1, -1), (-1, 1)]
    parts = [
        _disjoint_product(leaf(sa), _decompose(rest, sb, var_group)).scaled(0.5)
        for sa, sb in pairs
    ]
    return Certificate.combine(parts)


def decompose_multi(
    alpha: Sequence[int], sign: int, var_group: str = "x"
) -> Certificate:
    """Certificate of 1 + sign * T_alpha in T(1 +- x)_{|alpha|}.

    Variables are peeled off lowest index first; each step splits
    1 +- T_{alpha_i}(x_i) T_rest into two products handled recursively.

    Examples
    --------
    >>> cert = decompose_multi((1, 2), -1)
    >>> verify(cert) < 1e-12, cert.degree <= 3
    (True, True)

    """
    alpha = tuple(int(a) for a in alpha)
    _check_sign(sign)
    if not any(alpha):
        raise ValueError("decompose_multi needs a nonzero multi-index.")
    cert = _decompose(alpha, sign, var_group)
    target = Poly.from_terms(
        {(0,) * len(alpha): 1.0, alpha: float(sign)},
        len(alpha),
        Basis.CHEBYSHEV,
        var_group,
    )
    summands = tuple(s.model_copy(update={"origin": alpha}) for s in cert.summands)
    return Certificate(target=target, summands=summands, degree_cap=total_degree(alpha))


def norm_gap_certificate(p: Poly) -> Certificate:
    """Certificate of ||p||_{1,T} - p = sum |p_alpha| (1 - sign(p_alpha) T_alpha).

    Each nonconstant Chebyshev term contributes one branch built by
    :func:`decompose_multi`. A negative constant term adds the square 2|p_0|.

    """
    pc = p.to_basis(Basis.CHEBYSHEV)
    target = coeff_one_norm(pc) - pc
    summands: List[Summand] = []
    for alpha, c in pc.terms.items():
        if not any(alpha):
            if c < 0:
                one = Poly.constant(1.0, pc.nvars, Basis.MONOMIAL, pc.var_group)
                summands.append(
                    Summand(sos=(SquareTerm(weight=-2.0 * c, q=one),), origin=alpha)
                )
            continue
        sign = -1 if c > 0 else 1
        branch = decompose_multi(alpha, sign, pc.var_group).scaled(abs(c))
        summands.extend(branch.summands)
    return Certificate(target=target, summands=tuple(summands), degree_cap=pc.degree)


def shift_certificate(f: Poly, p: Poly, cert_p: Certificate) -> Certificate:
    """Certificate of f + ||p - f||_{1,T} from a certificate of p.

    f + ||p - f||_{1,T} = p + (||p - f||_{1,T} - (p - f)), so the summands of
    ``cert_p`` are joined with the norm-gap certificate of p - f.

    """
    d = cert_p.degree_cap
    if f.degree > d or p.degree > d:
        raise CertificateError(
            f"Degree violation: deg f={f.degree}, deg p={p.degree}, certificate cap {d}."
        )
    mismatch = cert_p.target.to_basis(Basis.CHEBYSHEV) - p.to_basis(Basis.CHEBYSHEV)
    if any(abs(c) > 1e-9 for c in mismatch.terms.values()):
        raise CertificateError("The given certificate does not certify p.")
    difference = p.to_basis(Basis.CHEBYSHEV) - f.to_basis(Basis.CHEBYSHEV)
    gap = norm_gap_certificate(difference)
    target = f.to_basis(Basis.CHEBYSHEV) + coeff_one_norm(difference)
    return Certificate(
        target=target,
        summands=cert_p.summands + gap.summands,
        degree_cap=d,
        group_degree_caps=cert_p.group_degree_caps,
    )


def load_certificate(path: Union[str, Path]) -> Certificate:
    return Certificate.model_validate_json(Path(path).read_text())


def dump_certificate(cert: Certificate, path: Union[str, Path]):
    Path(path).write_text(cert.model_dump_json(by_alias=True, indent=2))

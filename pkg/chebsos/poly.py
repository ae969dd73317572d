"""Sparse multivariate polynomials in the monomial and Chebyshev bases."""
from numpy.polynomial import chebyshev as npcheb
from numpy.polynomial import polynomial as nppoly
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationInfo,
    field_serializer,
    field_validator,
    model_validator,
)
from scipy import signal
import sympy
from sympy.parsing.sympy_parser import (
    convert_xor,
    parse_expr,
    standard_transformations,
)

from enum import Enum
from functools import lru_cache
from itertools import product
from math import comb, sqrt
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union
import logging
import re

import numpy as np

logger = logging.getLogger(__name__)

MultiIndex = Tuple[int, ...]

# Coefficients smaller than this (absolute) are dropped after every operation
DEDUPE_THRESHOLD = 1e-13
# Products with more term pairs than this go through n-d convolution
DENSE_PRODUCT_THRESHOLD = 4096
# Conversions of polynomials with more terms than this use per-axis matrices
DENSE_CONVERSION_THRESHOLD = 256


class Basis(str, Enum):
    MONOMIAL = "monomial"
    # T_alpha(x) = prod_i T_{alpha_i}(x_i)
    CHEBYSHEV = "chebyshev"
    # T^_0 = 1, T^_k = sqrt(2) T_k for k >= 1
    NORMALIZED_CHEBYSHEV = "normalized_chebyshev"


class BasisError(ValueError):
    """Operation applied to a polynomial stored in the wrong basis."""

    pass


class PolynomialParseError(ValueError):
    """Input could not be read as a polynomial."""

    pass


def total_degree(alpha: Sequence[int]) -> int:
    """|alpha|, the sum of the exponents."""
    return int(sum(alpha))


def support_size(alpha: Sequence[int]) -> int:
    """omega(alpha), the number of nonzero exponents."""
    return sum(1 for a in alpha if a != 0)


def multi_indices(n: int, d: int) -> List[MultiIndex]:
    """All multi-indices of length ``n`` with total degree at most ``d``.

    The result is in lexicographic order.

    Examples
    --------
    >>> multi_indices(2, 1)
    [(0, 0), (0, 1), (1, 0)]

    """
    if n < 1:
        raise ValueError("Number of variables must be positive.")
    if d < 0:
        return []

    def _walk(prefix: MultiIndex, remaining: int, slots: int) -> Iterator[MultiIndex]:
        if slots == 1:
            for a in range(remaining + 1):
                yield prefix + (a,)
            return
        for a in range(remaining + 1):
            yield from _walk(prefix + (a,), remaining - a, slots - 1)

    return list(_walk((), d, n))


def _canonical(terms: Dict[MultiIndex, float]) -> Dict[MultiIndex, float]:
    return {
        alpha: float(c)
        for alpha, c in sorted(terms.items())
        if abs(c) >= DEDUPE_THRESHOLD
    }


class Poly(BaseModel):
    """A sparse polynomial tagged with its basis and variable group.

    Parameters
    ----------
    nvars : int
        Number of variables.
    basis : Basis
        Basis the coefficients refer to.
    terms : dict
        Map from multi-index to coefficient. Entries below ``DEDUPE_THRESHOLD``
        are dropped and the map is kept in lexicographic order.
    var_group : str
        Label of the variable group. Mixed groups concatenate labels (``"uxy"``)
        and split ``nvars`` evenly between them.

    Examples
    --------
    >>> p = Poly(nvars=1, terms={(2,): 1.0})
    >>> p.to_basis(Basis.CHEBYSHEV).terms
    {(0,): 0.5, (2,): 0.5}

    """

    model_config = ConfigDict(frozen=True)

    nvars: int = Field(gt=0)
    basis: Basis = Basis.MONOMIAL
    terms: Dict[MultiIndex, float] = Field(default_factory=dict)
    var_group: str = "x"

    @model_validator(mode="before")
    @classmethod
    def _read_term_list(cls, data):
        # JSON carries terms as [{"alpha": [...], "c": ...}, ...]
        if isinstance(data, dict) and isinstance(data.get("terms"), list):
            data = dict(data)
            terms: Dict[MultiIndex, float] = {}
            for term in data["terms"]:
                try:
                    alpha = tuple(int(a) for a in term["alpha"])
                    c = float(term["c"])
                except (KeyError, TypeError) as e:
                    raise ValueError(f"Malformed term {term}: {e}")
                terms[alpha] = terms.get(alpha, 0.0) + c
            data["terms"] = terms
        return data

    @field_validator("terms")
    @classmethod
    def _check_terms(cls, terms: Dict[MultiIndex, float], info: ValidationInfo):
        nvars = info.data.get("nvars")
        for alpha, c in terms.items():
            if nvars is not None and len(alpha) != nvars:
                raise ValueError(
                    f"Multi-index {alpha} does not have length nvars={nvars}."
                )
            if any(a < 0 for a in alpha):
                raise ValueError(f"Multi-index {alpha} has a negative entry.")
            if not np.isfinite(c):
                raise ValueError(f"Coefficient of {alpha} is not finite.")
        return _canonical(terms)

    @model_validator(mode="after")
    def _check_group(self):
        if not self.var_group or self.nvars % len(self.var_group) != 0:
            raise ValueError(
                f"Variable group '{self.var_group}' cannot split {self.nvars} variables."
            )
        return self

    @field_serializer("terms")
    def _dump_terms(self, terms: Dict[MultiIndex, float], _info):
        return [{"alpha": list(alpha), "c": c} for alpha, c in terms.items()]

    @classmethod
    def from_terms(
        cls,
        terms: Dict[MultiIndex, float],
        nvars: int,
        basis: Basis = Basis.MONOMIAL,
        var_group: str = "x",
    ) -> "Poly":
        """Build a polynomial from trusted terms, skipping validation."""
        return cls.model_construct(
            nvars=nvars, basis=basis, terms=_canonical(terms), var_group=var_group
        )

    @classmethod
    def zero(cls, nvars: int, basis: Basis = Basis.MONOMIAL, var_group: str = "x"):
        return cls.from_terms({}, nvars, basis, var_group)

    @classmethod
    def constant(
        cls,
        c: float,
        nvars: int,
        basis: Basis = Basis.MONOMIAL,
        var_group: str = "x",
    ) -> "Poly":
        # T_0 = T^_0 = 1, so the constant term is the same in every basis
        return cls.from_terms({(0,) * nvars: c}, nvars, basis, var_group)

    @classmethod
    def variable(cls, i: int, nvars: int, var_group: str = "x") -> "Poly":
        """The monomial x_i (0-based)."""
        if not 0 <= i < nvars:
            raise ValueError(f"Variable index {i} out of range for {nvars} variables.")
        alpha = tuple(1 if k == i else 0 for k in range(nvars))
        return cls.from_terms({alpha: 1.0}, nvars, Basis.MONOMIAL, var_group)

    @classmethod
    def term(
        cls,
        alpha: Sequence[int],
        c: float = 1.0,
        basis: Basis = Basis.CHEBYSHEV,
        var_group: str = "x",
    ) -> "Poly":
        """A single basis element scaled by ``c``."""
        alpha = tuple(int(a) for a in alpha)
        return cls(nvars=len(alpha), basis=basis, terms={alpha: c}, var_group=var_group)

    @property
    def degree(self) -> int:
        """Total degree; the zero polynomial has degree 0."""
        return max((total_degree(alpha) for alpha in self.terms), default=0)

    def degree_in(self, indices: Sequence[int]) -> int:
        """Degree with respect to the variables in ``indices`` only."""
        indices = list(indices)
        return max(
            (sum(alpha[i] for i in indices) for alpha in self.terms), default=0
        )

    @property
    def group_size(self) -> int:
        return self.nvars // len(self.var_group)

    def group_indices(self, position: int) -> range:
        """Variable indices of the ``position``-th label of the variable group."""
        size = self.group_size
        return range(position * size, (position + 1) * size)

    def variable_degrees(self) -> Tuple[int, ...]:
        """Largest exponent of each variable."""
        degrees = [0] * self.nvars
        for alpha in self.terms:
            for i, a in enumerate(alpha):
                degrees[i] = max(degrees[i], a)
        return tuple(degrees)

    @property
    def is_zero(self) -> bool:
        return len(self.terms) == 0

    def coefficient(self, alpha: Sequence[int]) -> float:
        return self.terms.get(tuple(alpha), 0.0)

    def to_basis(self, basis: Basis) -> "Poly":
        """Return the same function with coefficients in ``basis``."""
        basis = Basis(basis)
        if basis == self.basis:
            return self
        if self.basis == Basis.NORMALIZED_CHEBYSHEV:
            return _from_normalized(self).to_basis(basis)
        if self.basis == Basis.MONOMIAL:
            return monomial_to_chebyshev(self).to_basis(basis)
        # From here the source is Chebyshev
        if basis == Basis.MONOMIAL:
            return chebyshev_to_monomial(self)
        return _to_normalized(self)

    def _like(self, terms: Dict[MultiIndex, float]) -> "Poly":
        return Poly.from_terms(terms, self.nvars, self.basis, self.var_group)

    def check_compatible(self, other: "Poly"):
        if self.nvars != other.nvars or self.var_group != other.var_group:
            raise ValueError(
                f"Dimension mismatch: {self.nvars} variables in group "
                f"'{self.var_group}' vs {other.nvars} in '{other.var_group}'."
            )

    def __add__(self, other) -> "Poly":
        if isinstance(other, (int, float, np.integer, np.floating)):
            other = Poly.constant(float(other), self.nvars, self.basis, self.var_group)
        if not isinstance(other, Poly):
            return NotImplemented
        self.check_compatible(other)
        other = other.to_basis(self.basis)
        terms = dict(self.terms)
        for alpha, c in other.terms.items():
            terms[alpha] = terms.get(alpha, 0.0) + c
        return self._like(terms)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return self._like({alpha: -c for alpha, c in self.terms.items()})

    def __sub__(self, other) -> "Poly":
        return self + (-other)

    def __rsub__(self, other) -> "Poly":
        return (-self) + other

    def __mul__(self, other) -> "Poly":
        if isinstance(other, (int, float, np.integer, np.floating)):
            return self._like({alpha: c * other for alpha, c in self.terms.items()})
        if not isinstance(other, Poly):
            return NotImplemented
        self.check_compatible(other)
        other = other.to_basis(self.basis)
        if self.basis == Basis.MONOMIAL:
            return monomial_mul(self, other)
        if self.basis == Basis.CHEBYSHEV:
            return cheb_mul(self, other)
        result = cheb_mul(_from_normalized(self), _from_normalized(other))
        return _to_normalized(result)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Poly":
        if not isinstance(k, int) or k < 0:
            raise ValueError("Only non-negative integer powers are supported.")
        result = Poly.constant(1.0, self.nvars, self.basis, self.var_group)
        for _ in range(k):
            result = result * self
        return result

    def __call__(self, point) -> Union[float, np.ndarray]:
        return evaluate(self, point)

    def embed(self, nvars: int, offset: int, var_group: str) -> "Poly":
        """Place this polynomial's variables at ``offset`` inside a larger group."""
        if offset < 0 or offset + self.nvars > nvars:
            raise ValueError(
                f"Cannot place {self.nvars} variables at offset {offset} of {nvars}."
            )
        pad_left = (0,) * offset
        pad_right = (0,) * (nvars - offset - self.nvars)
        terms = {pad_left + alpha + pad_right: c for alpha, c in self.terms.items()}
        return Poly.from_terms(terms, nvars, self.basis, var_group)

    def restrict(self, indices: Sequence[int], var_group: str) -> "Poly":
        """Keep only the variables in ``indices``; the others must not occur."""
        indices = list(indices)
        dropped = [i for i in range(self.nvars) if i not in indices]
        terms = {}
        for alpha, c in self.terms.items():
            if any(alpha[i] for i in dropped):
                raise ValueError(
                    f"Term {alpha} depends on variables outside {indices}."
                )
            terms[tuple(alpha[i] for i in indices)] = c
        return Poly.from_terms(terms, len(indices), self.basis, var_group)

    def partial_evaluate(self, values: Dict[int, float], var_group: str) -> "Poly":
        """Fix the variables in ``values`` and drop them from the polynomial."""
        source = self.to_basis(Basis.CHEBYSHEV) if self.basis != Basis.MONOMIAL else self
        kept = [i for i in range(self.nvars) if i not in values]
        if not kept:
            raise ValueError("At least one variable must remain free.")
        terms: Dict[MultiIndex, float] = {}
        for alpha, c in source.terms.items():
            factor = c
            for i, v in values.items():
                if source.basis == Basis.MONOMIAL:
                    factor *= v ** alpha[i]
                else:
                    factor *= _chebyshev_value(alpha[i], v)
            key = tuple(alpha[i] for i in kept)
            terms[key] = terms.get(key, 0.0) + factor
        return Poly.from_terms(terms, len(kept), source.basis, var_group)

    def to_text(self) -> str:
        """Readable form, e.g. ``x1^2*x2 - 0.5*x1 + 1`` or ``0.5*T[0,2]``."""
        if self.is_zero:
            return "0"
        pieces = []
        for alpha, c in self.terms.items():
            if self.basis == Basis.MONOMIAL:
                factors = [
                    f"x{i + 1}" if a == 1 else f"x{i + 1}^{a}"
                    for i, a in enumerate(alpha)
                    if a
                ]
            else:
                name = "T" if self.basis == Basis.CHEBYSHEV else "That"
                factors = [f"{name}[{','.join(str(a) for a in alpha)}]"] if any(alpha) else []
            body = "*".join(factors)
            if not body:
                pieces.append(f"{c:+.12g}")
            elif c == 1:
                pieces.append(f"+{body}")
            elif c == -1:
                pieces.append(f"-{body}")
            else:
                pieces.append(f"{c:+.12g}*{body}")
        text = " ".join(pieces)
        text = text.replace(" +", " + ").replace(" -", " - ")
        return text[1:] if text.startswith("+") else text

    def __str__(self) -> str:
        return self.to_text()


@lru_cache(maxsize=None)
def _power_in_chebyshev(k: int) -> Tuple[Tuple[int, float], ...]:
    """x^k = 2^(1-k) sum' C(k, (k-j)/2) T_j over j = k, k-2, ..., the j=0 term halved."""
    scale = 2.0 ** (1 - k)
    terms = []
    for j in range(k % 2, k + 1, 2):
        c = scale * comb(k, (k - j) // 2)
        if j == 0:
            c /= 2
        terms.append((j, c))
    return tuple(terms)


@lru_cache(maxsize=None)
def _chebyshev_in_powers(k: int) -> Tuple[Tuple[int, float], ...]:
    # cheb2poly runs the recurrence T_{k+1} = 2x T_k - T_{k-1}
    coefficients = npcheb.cheb2poly([0.0] * k + [1.0])
    return tuple((j, float(c)) for j, c in enumerate(coefficients) if c != 0)


def _chebyshev_value(k: int, v: float) -> float:
    return float(npcheb.chebval(v, [0.0] * k + [1.0]))


@lru_cache(maxsize=None)
def _conversion_matrix(table, size: int) -> np.ndarray:
    """Column k holds the expansion of basis element k in the target basis."""
    matrix = np.zeros((size, size))
    for k in range(size):
        for j, c in table(k):
            matrix[j, k] = c
    return matrix


def _convert_dense(p: Poly, table, basis: Basis) -> Poly:
    shape = tuple(d + 1 for d in p.variable_degrees())
    arr = _to_dense(p, shape)
    for axis, size in enumerate(shape):
        matrix = _conversion_matrix(table, size)
        arr = np.moveaxis(np.tensordot(matrix, arr, axes=(1, axis)), 0, axis)
    terms = {
        tuple(int(a) for a in idx): float(arr[tuple(idx)])
        for idx in np.argwhere(np.abs(arr) >= DEDUPE_THRESHOLD)
    }
    return Poly.from_terms(terms, p.nvars, basis, p.var_group)


def _convert_sparse(p: Poly, table, basis: Basis) -> Poly:
    terms: Dict[MultiIndex, float] = {}
    for alpha, c in p.terms.items():
        expansions = [table(a) for a in alpha]
        for combo in product(*expansions):
            key = tuple(j for j, _ in combo)
            value = c
            for _, w in combo:
                value *= w
            terms[key] = terms.get(key, 0.0) + value
    return Poly.from_terms(terms, p.nvars, basis, p.var_group)


def _convert(p: Poly, table, basis: Basis) -> Poly:
    if len(p.terms) > DENSE_CONVERSION_THRESHOLD:
        return _convert_dense(p, table, basis)
    return _convert_sparse(p, table, basis)


def monomial_to_chebyshev(p: Poly) -> Poly:
    """Convert a monomial-basis polynomial to the Chebyshev basis, one variable at a time.

    Examples
    --------
    >>> monomial_to_chebyshev(Poly(nvars=1, terms={(3,): 1.0})).terms
    {(1,): 0.75, (3,): 0.25}

    """
    if p.basis != Basis.MONOMIAL:
        raise BasisError(f"Expected a monomial-basis polynomial, got {p.basis.value}.")
    return _convert(p, _power_in_chebyshev, Basis.CHEBYSHEV)


def chebyshev_to_monomial(p: Poly) -> Poly:
    """Inverse of :func:`monomial_to_chebyshev`."""
    if p.basis != Basis.CHEBYSHEV:
        raise BasisError(f"Expected a Chebyshev-basis polynomial, got {p.basis.value}.")
    return _convert(p, _chebyshev_in_powers, Basis.MONOMIAL)


def _to_normalized(p: Poly) -> Poly:
    terms = {
        alpha: c / sqrt(2.0) ** support_size(alpha) for alpha, c in p.terms.items()
    }
    return Poly.from_terms(terms, p.nvars, Basis.NORMALIZED_CHEBYSHEV, p.var_group)


def _from_normalized(p: Poly) -> Poly:
    terms = {
        alpha: c * sqrt(2.0) ** support_size(alpha) for alpha, c in p.terms.items()
    }
    return Poly.from_terms(terms, p.nvars, Basis.CHEBYSHEV, p.var_group)


def chebyshev_product_terms(
    a: Dict[MultiIndex, float], b: Dict[MultiIndex, float]
) -> Dict[MultiIndex, float]:
    """Multiply two Chebyshev coefficient maps with T_j T_k = (T_{j+k} + T_{|j-k|}) / 2."""
    terms: Dict[MultiIndex, float] = {}
    for alpha, ca in a.items():
        for beta, cb in b.items():
            options = []
            weight = ca * cb
            for j, k in zip(alpha, beta):
                if j and k:
                    options.append((j + k, abs(j - k)))
                    weight *= 0.5
                else:
                    options.append((j + k,))
            for key in product(*options):
                terms[key] = terms.get(key, 0.0) + weight
    return terms


def _to_dense(p: Poly, shape: Tuple[int, ...]) -> np.ndarray:
    arr = np.zeros(shape)
    for alpha, c in p.terms.items():
        arr[alpha] = c
    return arr


def _from_dense(arr: np.ndarray, like: Poly) -> Poly:
    terms = {
        tuple(int(a) for a in idx): float(arr[tuple(idx)])
        for idx in np.argwhere(np.abs(arr) >= DEDUPE_THRESHOLD)
    }
    return like._like(terms)


def _symmetric_extension(arr: np.ndarray) -> np.ndarray:
    # Chebyshev coefficients c_k -> cosine series coefficients on k = -K..K
    for axis in range(arr.ndim):
        moved = np.moveaxis(arr, axis, 0)
        ext = np.concatenate([moved[:0:-1] / 2, moved[:1], moved[1:] / 2])
        arr = np.moveaxis(ext, 0, axis)
    return arr


def _fold(arr: np.ndarray) -> np.ndarray:
    for axis in range(arr.ndim):
        moved = np.moveaxis(arr, axis, 0)
        center = (moved.shape[0] - 1) // 2
        out = moved[center:].copy()
        if center:
            out[1:] += moved[center - 1 :: -1]
        arr = np.moveaxis(out, 0, axis)
    return arr


def _cheb_mul_dense(a: Poly, b: Poly) -> Poly:
    shape_a = tuple(d + 1 for d in a.variable_degrees())
    shape_b = tuple(d + 1 for d in b.variable_degrees())
    ext_a = _symmetric_extension(_to_dense(a, shape_a))
    ext_b = _symmetric_extension(_to_dense(b, shape_b))
    return _from_dense(_fold(signal.convolve(ext_a, ext_b)), a)


def _cheb_mul_sparse(a: Poly, b: Poly) -> Poly:
    return a._like(chebyshev_product_terms(a.terms, b.terms))


def cheb_mul(a: Poly, b: Poly) -> Poly:
    """Product of two Chebyshev-basis polynomials.

    Examples
    --------
    >>> t1 = Poly.term((1,))
    >>> cheb_mul(t1, t1).terms
    {(0,): 0.5, (2,): 0.5}

    """
    if a.basis != Basis.CHEBYSHEV or b.basis != Basis.CHEBYSHEV:
        raise BasisError("cheb_mul expects two Chebyshev-basis polynomials.")
    a.check_compatible(b)
    if len(a.terms) * len(b.terms) > DENSE_PRODUCT_THRESHOLD:
        return _cheb_mul_dense(a, b)
    return _cheb_mul_sparse(a, b)


def monomial_mul(a: Poly, b: Poly) -> Poly:
    """Product of two monomial-basis polynomials."""
    if a.basis != Basis.MONOMIAL or b.basis != Basis.MONOMIAL:
        raise BasisError("monomial_mul expects two monomial-basis polynomials.")
    a.check_compatible(b)
    if len(a.terms) * len(b.terms) > DENSE_PRODUCT_THRESHOLD:
        shape_a = tuple(d + 1 for d in a.variable_degrees())
        shape_b = tuple(d + 1 for d in b.variable_degrees())
        dense = signal.convolve(_to_dense(a, shape_a), _to_dense(b, shape_b))
        return _from_dense(dense, a)
    terms: Dict[MultiIndex, float] = {}
    for alpha, ca in a.terms.items():
        for beta, cb in b.terms.items():
            key = tuple(i + j for i, j in zip(alpha, beta))
            terms[key] = terms.get(key, 0.0) + ca * cb
    return a._like(terms)


def evaluate(p: Poly, point) -> Union[float, np.ndarray]:
    """Evaluate ``p`` at one point or at each row of an (m, nvars) array.

    Chebyshev factors come from the three-term recurrence (``chebvander``),
    so evaluation is stable on [-1, 1].

    """
    points = np.asarray(point, dtype=float)
    single = points.ndim <= 1
    points = np.atleast_2d(points)
    if points.shape[1] != p.nvars:
        raise ValueError(
            f"Point has {points.shape[1]} coordinates, polynomial has {p.nvars} variables."
        )
    source = p.to_basis(Basis.CHEBYSHEV) if p.basis == Basis.NORMALIZED_CHEBYSHEV else p
    vander = npcheb.chebvander if source.basis == Basis.CHEBYSHEV else nppoly.polyvander
    tables = [
        vander(points[:, i], degree) for i, degree in enumerate(source.variable_degrees())
    ]
    values = np.zeros(points.shape[0])
    for alpha, c in source.terms.items():
        term = np.full(points.shape[0], c)
        for i, a in enumerate(alpha):
            if a:
                term = term * tables[i][:, a]
        values += term
    return float(values[0]) if single else values


def coeff_one_norm(p: Poly, basis: Basis = Basis.CHEBYSHEV) -> float:
    """Sum of absolute coefficients of ``p`` in ``basis``.

    Examples
    --------
    >>> f = Poly(nvars=1, terms={(2,): 3.0, (0,): -1.0})
    >>> coeff_one_norm(f, Basis.MONOMIAL), coeff_one_norm(f, Basis.CHEBYSHEV)
    (4.0, 2.0)

    """
    return float(sum(abs(c) for c in p.to_basis(basis).terms.values()))


_VARIABLE_PATTERN = re.compile(r"(?<![A-Za-z_])x(\d*)(?![A-Za-z_])")


def parse_polynomial(text: str, nvars: Optional[int] = None) -> Poly:
    """Parse a monomial-basis expression such as ``x1^2*x2 - 0.5*x1 + 1``.

    Variables are ``x1, x2, ...``; a bare ``x`` means ``x1``.

    """
    indices = []
    for match in _VARIABLE_PATTERN.finditer(text):
        index = int(match.group(1)) if match.group(1) else 1
        if index < 1:
            raise PolynomialParseError(f"Variable indices start at x1: '{match.group(0)}'.")
        indices.append(index)
    found = max(indices, default=1)
    if nvars is None:
        nvars = found
    elif nvars < found:
        raise PolynomialParseError(f"Expression uses x{found} but nvars={nvars}.")
    symbols = sympy.symbols(f"x1:{nvars + 1}")
    local_dict = {f"x{i + 1}": s for i, s in enumerate(symbols)}
    local_dict["x"] = symbols[0]
    try:
        expr = parse_expr(
            text,
            local_dict=local_dict,
            transformations=standard_transformations + (convert_xor,),
        )
        poly = sympy.Poly(expr, *symbols)
    except Exception as e:  # sympy reports syntax and tokenizer problems with many types
        raise PolynomialParseError(f"Could not parse '{text}': {e}")
    terms = {}
    for monomial, c in poly.terms():
        try:
            terms[tuple(int(e) for e in monomial)] = float(c)
        except TypeError:
            raise PolynomialParseError(f"Coefficient '{c}' is not a real number.")
    return Poly(nvars=nvars, basis=Basis.MONOMIAL, terms=terms)


def load_polynomial(path: Union[str, Path]) -> Poly:
    """Read a polynomial from a JSON file or a plain-text expression file."""
    text = Path(path).read_text().strip()
    if text.startswith("{"):
        try:
            return Poly.model_validate_json(text)
        except ValueError as e:
            raise PolynomialParseError(f"Invalid polynomial JSON in {path}: {e}")
    return parse_polynomial(text)


def dump_polynomial(p: Poly, path: Union[str, Path]):
    Path(path).write_text(p.model_dump_json(indent=2))

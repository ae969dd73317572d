"""Compile polynomial bounds into semidefinite programs.

All coefficient matching is done in the Chebyshev basis: a Gram block G_I
for the generator subset I contributes

    sum_{i,j} G_I[i, j] * prod_{g in I} g * T_{b_i} T_{b_j}

to the certified polynomial, where b is the block's basis of multi-indices.
"""
from chebsos.certificates import Generator
from chebsos.jackson import apriori_gap_bound, product_kernel_gap
from chebsos.poly import (
    Basis,
    MultiIndex,
    Poly,
    chebyshev_product_terms,
    multi_indices,
    support_size,
)
from chebsos.solvers import (
    InteriorPointSolver,
    SdpProblem,
    SdpProblemBuilder,
    SolveReport,
    Solver,
    SolverError,
    SolverOptions,
    SolverStatus,
    SolverTimeLimit,
)
from pydantic import BaseModel, ConfigDict, Field
from enum import Enum
from itertools import combinations
from typing import Dict, List, Optional, Tuple, Union
import logging
import warnings

import numpy as np

logger = logging.getLogger(__name__)


class DegreeError(ValueError):
    """A polynomial is too large for the requested degree cap."""

    pass


class GeneratorSet(str, Enum):
    PLUS_MINUS = "plusminus"
    SQUARES = "squares"


class PreorderingScheme(BaseModel):
    """Generator subsets and Gram bases of a truncated pre-ordering.

    ``SQUARES`` uses 1 - x_i^2 = (1 - x_i)(1 + x_i), so its subsets are
    stored as both-sign generator pairs and every subset's degree is the
    number of generators it holds.

    Examples
    --------
    >>> len(PreorderingScheme(nvars=1, degree_cap=2).subsets())
    4
    >>> len(PreorderingScheme(nvars=1, degree_cap=2, generator_set="squares").subsets())
    2

    """

    model_config = ConfigDict(frozen=True)

    nvars: int = Field(gt=0)
    degree_cap: int = Field(ge=0)
    generator_set: GeneratorSet = GeneratorSet.PLUS_MINUS

    def subsets(self) -> List[Tuple[Generator, ...]]:
        n, r = self.nvars, self.degree_cap
        result = []
        if self.generator_set == GeneratorSet.PLUS_MINUS:
            generators = [Generator(index=i, sign=s) for i in range(n) for s in (-1, 1)]
            for size in range(min(r, 2 * n) + 1):
                result.extend(combinations(generators, size))
        else:
            for size in range(min(r // 2, n) + 1):
                for indices in combinations(range(n), size):
                    result.append(
                        tuple(Generator(index=i, sign=s) for i in indices for s in (-1, 1))
                    )
        return result

    def gram_basis(self, subset: Tuple[Generator, ...]) -> List[MultiIndex]:
        return multi_indices(self.nvars, (self.degree_cap - len(subset)) // 2)


def subset_label(subset: Tuple[Generator, ...]) -> str:
    if not subset:
        return "sos"
    return "g" + "".join(f"{'+' if g.sign > 0 else '-'}{g.index + 1}" for g in subset)


def _generator_terms(subset: Tuple[Generator, ...], n: int) -> Dict[MultiIndex, float]:
    terms = {(0,) * n: 1.0}
    for g in subset:
        alpha = tuple(1 if k == g.index else 0 for k in range(n))
        terms = chebyshev_product_terms(terms, {(0,) * n: 1.0, alpha: float(g.sign)})
    return terms


def _add_gram_block(
    builder: SdpProblemBuilder,
    label: str,
    basis: List[MultiIndex],
    weight_terms: Dict[MultiIndex, float],
    rows: Dict[MultiIndex, int],
) -> int:
    """Add the block sum G[i, j] * w * T_{b_i} T_{b_j} to the coefficient rows."""
    k = builder.add_block(label, len(basis))
    for i, beta in enumerate(basis):
        for j in range(i, len(basis)):
            pair = chebyshev_product_terms({beta: 1.0}, {basis[j]: 1.0})
            for gamma, c in chebyshev_product_terms(weight_terms, pair).items():
                if abs(c) > 0:
                    builder.add_constraint_entry(rows[gamma], k, i, j, c)
    return k


def _add_preordering(
    builder: SdpProblemBuilder,
    scheme: PreorderingScheme,
    rows: Dict[MultiIndex, int],
) -> List[Tuple[Tuple[Generator, ...], int]]:
    blocks = []
    for subset in scheme.subsets():
        basis = scheme.gram_basis(subset)
        weight_terms = _generator_terms(subset, scheme.nvars)
        k = _add_gram_block(builder, subset_label(subset), basis, weight_terms, rows)
        blocks.append((subset, k))
    return blocks


def _run(
    problem: SdpProblem,
    solver: Optional[Solver],
    options: Optional[SolverOptions],
    what: str,
) -> SolveReport:
    solver = solver or InteriorPointSolver(options)
    logger.debug(
        f"Solving {what}: {len(problem.blocks)} blocks, {problem.n_constraints} constraints"
    )
    report = solver.solve(problem)
    if report.status == SolverStatus.OPTIMAL:
        return report
    if report.status == SolverStatus.NEAR_OPTIMAL:
        message = f"{what} solved only to reduced accuracy (residuals {report.residuals})"
        logger.warning(message)
        warnings.warn(message)
        return report
    if report.status == SolverStatus.TIME_LIMIT:
        raise SolverTimeLimit(f"{what} exceeded its time limit after {report.iterations} iterations.")
    raise SolverError(f"{what} failed with status {report.status.value}.")


def _chebyshev_rows(n: int, degree: int) -> Dict[MultiIndex, int]:
    return {alpha: j for j, alpha in enumerate(multi_indices(n, degree))}


class BoundResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    value: float
    r: int
    scheme: GeneratorSet
    report: SolveReport
    gram: Dict[str, np.ndarray] = Field(default_factory=dict)
    """Gram matrix per generator subset label"""

    gram_bases: Dict[str, List[MultiIndex]] = Field(default_factory=dict)


def lower_bound(
    f: Poly,
    r: int,
    scheme: Union[GeneratorSet, str] = GeneratorSet.PLUS_MINUS,
    solver: Optional[Solver] = None,
    options: Optional[SolverOptions] = None,
) -> BoundResult:
    """Largest lambda with f - lambda in the truncated pre-ordering of degree r.

    Parameters
    ----------
    f : Poly
        Polynomial of degree at most r, in any basis.
    r : int
        Degree cap.
    scheme : GeneratorSet or str, optional
        ``plusminus`` for T(1 +- x_i)_r, ``squares`` for T(1 - x_i^2)_r.

    Returns
    -------
    BoundResult whose value is a lower bound on the minimum of f over [-1, 1]^n.

    Raises
    ------
    DegreeError
        deg f > r, or deg f > r - 1 for odd r under ``squares``.
    SolverError
        The SDP was not solved.

    """
    scheme = GeneratorSet(scheme)
    if r < 0 or f.degree > r:
        raise DegreeError(f"Polynomial of degree {f.degree} does not fit the degree cap r={r}.")
    # every member of T(1 - x_i^2)_r has degree at most 2 * (r // 2)
    if scheme == GeneratorSet.SQUARES and f.degree > 2 * (r // 2):
        raise DegreeError(
            f"Polynomial of degree {f.degree} needs an even degree cap under the "
            f"squares scheme, got r={r}."
        )
    n = f.nvars
    fc = f.to_basis(Basis.CHEBYSHEV)
    rows = _chebyshev_rows(n, r if scheme == GeneratorSet.PLUS_MINUS else 2 * (r // 2))
    builder = SdpProblemBuilder(len(rows))
    preordering = PreorderingScheme(nvars=n, degree_cap=r, generator_set=scheme)
    blocks = _add_preordering(builder, preordering, rows)
    lam = builder.add_free("lambda", cost=-1.0)
    builder.add_free_coefficient(rows[(0,) * n], lam, 1.0)
    for alpha, c in fc.terms.items():
        builder.set_rhs(rows[alpha], c)
    problem = builder.build()
    report = _run(problem, solver, options, f"lower bound (r={r}, {scheme.value})")
    return BoundResult(
        value=report.free_value(problem, "lambda"),
        r=r,
        scheme=scheme,
        report=report,
        gram={subset_label(s): report.X[k] for s, k in blocks},
        gram_bases={subset_label(s): preordering.gram_basis(s) for s, _ in blocks},
    )


class ThetaResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    n: int
    d: int
    r: int
    bound: float
    """Optimal t, an upper bound on Theta^r_{n,d}"""

    kernel_coefficients: Dict[MultiIndex, float]
    """Recovered p_alpha for 0 < |alpha| <= r; only |alpha| <= d enter the bound"""

    report: SolveReport
    jackson_gap: Optional[float] = None
    """max |1 - lambda_alpha| of the product Jackson kernel of degree r / n, when n divides r"""

    analytic_bound: Optional[float] = None
    """pi^2 d^2 / (r / n + 2)^2 when n divides r and the bound is not vacuous"""


def _p_label(alpha: MultiIndex) -> str:
    return "p_" + "_".join(str(a) for a in alpha)


def _tail_indices(n: int, d: int, r: int) -> List[MultiIndex]:
    return [alpha for alpha in multi_indices(n, r) if sum(alpha) > d]


def theta_problem(n: int, d: int, r: int) -> SdpProblem:
    """min t s.t. |1 - p_alpha| <= t for 0 < |alpha| <= d and
    1 + sum_{0 < |alpha| <= r} 2^w(alpha) p_alpha T_alpha in T(1 +- x)_r.

    Coefficients with d < |alpha| <= r are free and carry no deviation row.
    """
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}.")
    if not 1 <= d <= r:
        raise DegreeError(f"Need 1 <= d <= r, got d={d}, r={r}.")
    rows = _chebyshev_rows(n, r)
    alphas = [alpha for alpha in multi_indices(n, d) if any(alpha)]
    builder = SdpProblemBuilder(len(rows) + 2 * len(alphas))
    _add_preordering(builder, PreorderingScheme(nvars=n, degree_cap=r), rows)
    t = builder.add_free("t", cost=1.0)
    builder.set_rhs(rows[(0,) * n], 1.0)
    for a, alpha in enumerate(alphas):
        p = builder.add_free(_p_label(alpha))
        builder.add_free_coefficient(rows[alpha], p, -(2.0 ** support_size(alpha)))
        # t + p - s+ = 1 and t - p - s- = -1
        for offset, sign in ((0, 1.0), (1, -1.0)):
            j = len(rows) + 2 * a + offset
            slack = builder.add_block(f"s{'+' if sign > 0 else '-'}{_p_label(alpha)[1:]}", 1)
            builder.add_constraint_entry(j, slack, 0, 0, -1.0)
            builder.add_free_coefficient(j, t, 1.0)
            builder.add_free_coefficient(j, p, sign)
            builder.set_rhs(j, sign)
    for alpha in _tail_indices(n, d, r):
        p = builder.add_free(_p_label(alpha))
        builder.add_free_coefficient(rows[alpha], p, -(2.0 ** support_size(alpha)))
    return builder.build()


def theta_upper_bound(
    n: int,
    d: int,
    r: int,
    solver: Optional[Solver] = None,
    options: Optional[SolverOptions] = None,
) -> ThetaResult:
    """Upper bound on Theta^r_{n,d}, the best worst-case kernel deviation.

    Examples
    --------
    >>> round(theta_upper_bound(1, 1, 1).bound, 4)
    0.5

    """
    problem = theta_problem(n, d, r)
    report = _run(problem, solver, options, f"Theta SDP (n={n}, d={d}, r={r})")
    coefficients = {
        alpha: report.free_value(problem, _p_label(alpha))
        for alpha in multi_indices(n, r)
        if any(alpha)
    }
    jackson_gap, analytic = None, None
    if r % n == 0:
        jackson_gap = product_kernel_gap(n, d, r // n)
        analytic = apriori_gap_bound(n, d, r // n, 1.0)
    return ThetaResult(
        n=n,
        d=d,
        r=r,
        bound=report.free_value(problem, "t"),
        kernel_coefficients=coefficients,
        report=report,
        jackson_gap=jackson_gap,
        analytic_bound=analytic,
    )


class RhoResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    d: int
    rho: float
    lambda_star: List[float]
    """lambda_0, lambda_1, ..., lambda_n"""

    report: SolveReport


def rho(
    f: Poly,
    d: int,
    solver: Optional[Solver] = None,
    options: Optional[SolverOptions] = None,
) -> RhoResult:
    """Distance rho_d = min sum lambda_i with f + lambda_0 + sum lambda_i x_i^(2d) a sum of squares.

    Raises
    ------
    DegreeError
        deg f > 2d.

    """
    if d < 1 or f.degree > 2 * d:
        raise DegreeError(f"Polynomial of degree {f.degree} does not fit 2d={2 * d}.")
    n = f.nvars
    rows = _chebyshev_rows(n, 2 * d)
    builder = SdpProblemBuilder(len(rows))
    _add_gram_block(builder, "sos", multi_indices(n, d), {(0,) * n: 1.0}, rows)
    lambdas = []
    for i in range(n + 1):
        k = builder.add_block(f"lambda{i}", 1)
        builder.add_objective_entry(k, 0, 0, 1.0)
        if i == 0:
            builder.add_constraint_entry(rows[(0,) * n], k, 0, 0, -1.0)
        else:
            power = Poly.from_terms(
                {tuple(2 * d if m == i - 1 else 0 for m in range(n)): 1.0}, n
            ).to_basis(Basis.CHEBYSHEV)
            for gamma, c in power.terms.items():
                builder.add_constraint_entry(rows[gamma], k, 0, 0, -c)
        lambdas.append(k)
    for alpha, c in f.to_basis(Basis.CHEBYSHEV).terms.items():
        builder.set_rhs(rows[alpha], c)
    problem = builder.build()
    report = _run(problem, solver, options, f"rho_{d}")
    return RhoResult(
        d=d,
        rho=report.primal_objective,
        lambda_star=[float(report.X[k][0, 0]) for k in lambdas],
        report=report,
    )


def corollary_lower_bound(
    f: Poly,
    d: int,
    solver: Optional[Solver] = None,
    options: Optional[SolverOptions] = None,
) -> float:
    """-rho_d, a lower bound on the minimum of f over [-1, 1]^n."""
    return -rho(f, d, solver, options).rho

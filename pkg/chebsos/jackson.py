"""Jackson kernel coefficients and the smoothing operator they define."""
from chebsos.poly import (
    Basis,
    MultiIndex,
    Poly,
    coeff_one_norm,
    multi_indices,
    total_degree,
)
from numpy.polynomial import chebyshev as npcheb
from pydantic import BaseModel, ConfigDict, Field, model_validator
from functools import lru_cache
from typing import Dict, Optional, Union
import logging
import math

import numpy as np

logger = logging.getLogger(__name__)


class KernelSupportError(ValueError):
    """A polynomial term lies outside the multi-indices a kernel covers."""

    pass


@lru_cache(maxsize=None)
def jackson_coefficient(k: int, r: int) -> float:
    """Coefficient lambda_k^r of the degree-r Jackson kernel.

    Parameters
    ----------
    k : int
        Chebyshev index, 0 <= k <= r.
    r : int
        Kernel degree, r >= 1.

    Returns
    -------
    ((r + 2 - k) cos(k theta) + sin(k theta) cot(theta)) / (r + 2) with
    theta = pi / (r + 2). lambda_0^r = 1.

    Examples
    --------
    >>> jackson_coefficient(1, 1)
    0.5

    """
    if r < 1:
        raise ValueError(f"Kernel degree must be at least 1, got r={r}.")
    if not 0 <= k <= r:
        raise ValueError(f"Index k={k} outside 0..{r}.")
    if k == 0:
        return 1.0
    theta = math.pi / (r + 2)
    return (
        (r + 2 - k) * math.cos(k * theta)
        + math.sin(k * theta) / math.sin(theta) * math.cos(theta)
    ) / (r + 2)


class KernelCoefficients(BaseModel):
    """Coefficients lambda_alpha of K_r(x, y) = sum lambda_alpha T^_alpha(x) T^_alpha(y).

    Multi-indices with total degree up to ``coverage`` are covered; a covered
    index missing from ``lambdas`` has coefficient 0.

    """

    model_config = ConfigDict(frozen=True)

    nvars: int = Field(gt=0)
    degree_cap: int = Field(ge=1)
    """Largest degree per variable (r)"""

    coverage: int = Field(ge=0)
    """Largest total degree whose coefficients are known"""

    lambdas: Dict[MultiIndex, float]

    @model_validator(mode="after")
    def _check_lambdas(self):
        zero = (0,) * self.nvars
        if abs(self.lambdas.get(zero, 0.0) - 1.0) > 1e-12:
            raise ValueError("lambda_0 must equal 1 so constants are preserved.")
        for alpha, value in self.lambdas.items():
            if len(alpha) != self.nvars:
                raise ValueError(f"Multi-index {alpha} has wrong length.")
            if max(alpha) > self.degree_cap or total_degree(alpha) > self.coverage:
                raise ValueError(f"Multi-index {alpha} outside the kernel support.")
            if not -1e-12 <= value <= 1 + 1e-12:
                raise ValueError(f"lambda_{alpha} = {value} is not in [0, 1].")
        return self

    def coefficient(self, alpha: MultiIndex) -> float:
        if total_degree(alpha) > self.coverage:
            raise KernelSupportError(
                f"Multi-index {alpha} exceeds the stored total degree {self.coverage}."
            )
        return self.lambdas.get(tuple(alpha), 0.0)


def product_kernel(n: int, r: int, d_cap: int) -> KernelCoefficients:
    """Product of univariate Jackson kernels, stored for |alpha| <= d_cap.

    lambda_alpha = prod_i lambda_{alpha_i}^r; indices with some alpha_i > r
    vanish and are not stored.

    """
    if n < 1 or r < 1:
        raise ValueError("Both n and r must be at least 1.")
    lambdas = {}
    for alpha in multi_indices(n, d_cap):
        if max(alpha) > r:
            continue
        value = 1.0
        for a in alpha:
            value *= jackson_coefficient(a, r)
        lambdas[alpha] = value
    return KernelCoefficients(nvars=n, degree_cap=r, coverage=d_cap, lambdas=lambdas)


def smooth(f: Poly, kernel: KernelCoefficients) -> Poly:
    """Apply the convolution operator: f_alpha -> lambda_alpha f_alpha in the Chebyshev basis.

    Examples
    --------
    >>> f = Poly.term((1,))
    >>> round(smooth(f, product_kernel(1, 2, 1)).coefficient((1,)), 6)
    0.707107

    """
    if f.nvars != kernel.nvars:
        raise ValueError(
            f"Polynomial has {f.nvars} variables, kernel has {kernel.nvars}."
        )
    fc = f.to_basis(Basis.CHEBYSHEV)
    terms = {alpha: kernel.coefficient(alpha) * c for alpha, c in fc.terms.items()}
    return Poly.from_terms(terms, f.nvars, Basis.CHEBYSHEV, f.var_group)


def smoothing_error(f: Poly, kernel: KernelCoefficients) -> float:
    """||smooth(f) - f||_{1,T}."""
    return coeff_one_norm(smooth(f, kernel) - f.to_basis(Basis.CHEBYSHEV))


def apriori_gap_bound(n: int, d: int, r: int, norm1T: float) -> Optional[float]:
    """Analytic bound pi^2 d^2 / (r + 2)^2 * ||f||_{1,T} on f_min - f^_(rn).

    Parameters
    ----------
    n : int
        Number of variables.
    d : int
        Degree of f.
    r : int
        Per-variable degree of the product Jackson kernel.
    norm1T : float
        ||f||_{1,T}.

    Returns
    -------
    The bound, or None when pi d >= r + 2 and the bound is vacuous.

    """
    if n < 1 or d < 0 or r < 1:
        raise ValueError(f"Invalid arguments n={n}, d={d}, r={r}.")
    if norm1T == 0:
        return 0.0
    if math.pi * d >= r + 2:
        logger.debug(f"Jackson bound vacuous for d={d}, r={r}")
        return None
    return math.pi**2 * d**2 / (r + 2) ** 2 * norm1T


def product_kernel_gap(n: int, d: int, r: int) -> float:
    """max |1 - lambda_alpha| over 0 < |alpha| <= d for the product Jackson kernel of degree r."""
    kernel = product_kernel(n, r, d)
    return max(
        (
            abs(1.0 - kernel.coefficient(alpha))
            for alpha in multi_indices(n, d)
            if any(alpha)
        ),
        default=0.0,
    )


def kernel_value(
    r: int, x: Union[float, np.ndarray], y: Union[float, np.ndarray]
) -> np.ndarray:
    """Evaluate the univariate kernel 1 + 2 sum_k lambda_k^r T_k(x) T_k(y)."""
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    weights = np.array([jackson_coefficient(k, r) for k in range(r + 1)])
    weights[1:] *= 2
    vx = npcheb.chebvander(x.ravel(), r)
    vy = npcheb.chebvander(y.ravel(), r)
    return ((vx * vy) @ weights).reshape(x.shape)

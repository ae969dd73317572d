"""Block-diagonal semidefinite programs in standard primal form.

    minimize    sum_k <C_k, X_k> + c_free . z
    subject to  sum_k <A_jk, X_k> + (F z)_j = b_j,   j = 1..m
                X_k positive semidefinite, z free

with dual

    maximize    b . y
    subject to  S_k = C_k - sum_j y_j A_jk  positive semidefinite,  F^T y = c_free
"""
from chebsos.config import Settings, get_settings
from pydantic import BaseModel, ConfigDict, Field, model_validator
from enum import Enum
from typing import Dict, List, Optional, Tuple
import logging

import numpy as np

logger = logging.getLogger(__name__)

SYMMETRY_TOLERANCE = 1e-14


class SolverStatus(str, Enum):
    OPTIMAL = "optimal"
    NEAR_OPTIMAL = "near_optimal"
    INFEASIBLE = "infeasible"
    MAX_ITERATIONS = "max_iterations"
    NUMERICAL_FAILURE = "numerical_failure"
    TIME_LIMIT = "time_limit"


class SolverError(Exception):
    """A semidefinite program could not be solved to the requested accuracy."""

    pass


class SolverTimeLimit(SolverError):
    """The wall-clock budget of a solve was exhausted."""

    pass


class SolverOptions(BaseModel):
    model_config = ConfigDict(frozen=True)

    tolerance: float = Field(1e-8, gt=0)
    """Relative primal and dual feasibility required for an optimal status"""

    gap_tolerance: float = Field(1e-7, gt=0)
    max_iterations: int = Field(200, ge=1)
    step_fraction: float = Field(0.98, gt=0, lt=1)
    regularization: Tuple[float, ...] = (1e-12, 1e-11, 1e-10, 1e-9, 1e-8)
    """Diagonal shifts, relative to the largest diagonal entry, tried when a factorization fails"""

    near_optimal_factor: float = Field(100.0, ge=1)
    time_limit: Optional[float] = Field(None, gt=0)
    """Wall-clock seconds; None for no limit"""

    @classmethod
    def from_settings(cls, settings: Optional[Settings] = None, **overrides):
        settings = settings or get_settings()
        values = dict(
            tolerance=settings.sdp_tolerance,
            gap_tolerance=settings.sdp_gap_tolerance,
            max_iterations=settings.sdp_max_iterations,
        )
        values.update(overrides)
        return cls(**values)


class Block(BaseModel):
    model_config = ConfigDict(frozen=True)

    label: str
    dim: int = Field(gt=0)


class SdpProblem(BaseModel):
    """A dense block-diagonal SDP.

    Parameters
    ----------
    blocks : list of Block
        Labels and sizes of the PSD blocks.
    objective : list of ndarray
        C_k, shape (dim_k, dim_k) per block.
    constraints : list of ndarray
        A_k stacked over constraints, shape (m, dim_k, dim_k) per block.
    rhs : ndarray
        b, shape (m,).
    free_cost : ndarray
        Cost of the free scalars, shape (f,).
    free_constraints : ndarray
        F, shape (m, f).
    free_labels : list of str
        One label per free scalar.

    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    blocks: List[Block]
    objective: List[np.ndarray]
    constraints: List[np.ndarray]
    rhs: np.ndarray
    free_cost: np.ndarray = Field(default_factory=lambda: np.zeros(0))
    free_constraints: Optional[np.ndarray] = None
    free_labels: List[str] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_shapes(self):
        m = self.rhs.shape[0] if self.rhs.ndim == 1 else -1
        if m <= 0:
            raise ValueError("At least one constraint is required.")
        if not self.blocks:
            raise ValueError("At least one PSD block is required.")
        if len(self.objective) != len(self.blocks) or len(self.constraints) != len(self.blocks):
            raise ValueError("Objective and constraints need one entry per block.")
        for block, c, a in zip(self.blocks, self.objective, self.constraints):
            if c.shape != (block.dim, block.dim):
                raise ValueError(f"Objective of block '{block.label}' has shape {c.shape}.")
            if a.shape != (m, block.dim, block.dim):
                raise ValueError(f"Constraints of block '{block.label}' have shape {a.shape}.")
            scale = max(1.0, float(np.abs(a).max(initial=0.0)), float(np.abs(c).max()))
            if np.abs(c - c.T).max() > SYMMETRY_TOLERANCE * scale or (
                np.abs(a - a.transpose(0, 2, 1)).max(initial=0.0) > SYMMETRY_TOLERANCE * scale
            ):
                raise ValueError(f"Block '{block.label}' has a non-symmetric matrix.")
        f = self.free_cost.shape[0]
        if f:
            if self.free_constraints is None or self.free_constraints.shape != (m, f):
                raise ValueError(f"Free constraint matrix must have shape ({m}, {f}).")
            if len(self.free_labels) != f:
                raise ValueError("Every free scalar needs a label.")
        return self

    @property
    def n_constraints(self) -> int:
        return self.rhs.shape[0]

    @property
    def n_free(self) -> int:
        return self.free_cost.shape[0]

    @property
    def free_matrix(self) -> np.ndarray:
        """F, with shape (m, 0) when there are no free scalars."""
        if self.free_constraints is None:
            return np.zeros((self.n_constraints, 0))
        return self.free_constraints

    @property
    def total_dim(self) -> int:
        return sum(block.dim for block in self.blocks)

    def block_index(self, label: str) -> int:
        for k, block in enumerate(self.blocks):
            if block.label == label:
                return k
        raise KeyError(label)


class SdpProblemBuilder:
    """Accumulate sparse entries and assemble an :class:`SdpProblem`.

    Off-diagonal entries are mirrored, so ``add_constraint_entry(j, k, 0, 1, v)``
    adds v to both A_jk[0, 1] and A_jk[1, 0].

    Examples
    --------
    >>> builder = SdpProblemBuilder(1)
    >>> k = builder.add_block("X", 1)
    >>> builder.add_objective_entry(k, 0, 0, 1.0)
    >>> builder.add_constraint_entry(0, k, 0, 0, 1.0)
    >>> builder.set_rhs(0, 3.0)
    >>> builder.build().n_constraints
    1

    """

    def __init__(self, n_constraints: int) -> None:
        if n_constraints < 1:
            raise ValueError("At least one constraint is required.")
        self.n_constraints = n_constraints
        self.blocks: List[Block] = []
        self.free_labels: List[str] = []
        self.free_cost: List[float] = []
        self._objective: List[Tuple[int, int, int, float]] = []
        self._constraints: List[Tuple[int, int, int, int, float]] = []
        self._free_entries: List[Tuple[int, int, float]] = []
        self._rhs: Dict[int, float] = {}

    def add_block(self, label: str, dim: int) -> int:
        self.blocks.append(Block(label=label, dim=dim))
        return len(self.blocks) - 1

    def add_free(self, label: str, cost: float = 0.0) -> int:
        self.free_labels.append(label)
        self.free_cost.append(cost)
        return len(self.free_labels) - 1

    def _check_entry(self, block: int, row: int, col: int):
        dim = self.blocks[block].dim
        if not (0 <= row < dim and 0 <= col < dim):
            raise ValueError(f"Entry ({row}, {col}) outside block {block} of size {dim}.")

    def _check_row(self, j: int):
        if not 0 <= j < self.n_constraints:
            raise ValueError(f"Constraint {j} outside 0..{self.n_constraints - 1}.")

    def add_objective_entry(self, block: int, row: int, col: int, value: float):
        self._check_entry(block, row, col)
        self._objective.append((block, row, col, value))

    def add_constraint_entry(self, j: int, block: int, row: int, col: int, value: float):
        self._check_row(j)
        self._check_entry(block, row, col)
        self._constraints.append((j, block, row, col, value))

    def add_free_coefficient(self, j: int, free: int, value: float):
        self._check_row(j)
        self._free_entries.append((j, free, value))

    def set_rhs(self, j: int, value: float):
        self._check_row(j)
        self._rhs[j] = value

    def build(self) -> SdpProblem:
        m = self.n_constraints
        objective = [np.zeros((b.dim, b.dim)) for b in self.blocks]
        constraints = [np.zeros((m, b.dim, b.dim)) for b in self.blocks]
        for block, row, col, value in self._objective:
            objective[block][row, col] += value
            if row != col:
                objective[block][col, row] += value
        for j, block, row, col, value in self._constraints:
            constraints[block][j, row, col] += value
            if row != col:
                constraints[block][j, col, row] += value
        rhs = np.zeros(m)
        for j, value in self._rhs.items():
            rhs[j] = value
        f = len(self.free_labels)
        free_constraints = np.zeros((m, f)) if f else None
        for j, free, value in self._free_entries:
            free_constraints[j, free] += value
        logger.debug(
            f"Built SDP with {len(self.blocks)} blocks, total size "
            f"{sum(b.dim for b in self.blocks)}, {m} constraints and {f} free scalars"
        )
        return SdpProblem(
            blocks=list(self.blocks),
            objective=objective,
            constraints=constraints,
            rhs=rhs,
            free_cost=np.array(self.free_cost, dtype=float),
            free_constraints=free_constraints,
            free_labels=list(self.free_labels),
        )


class Residuals(BaseModel):
    model_config = ConfigDict(frozen=True)

    primal: float
    """||b - A(X) - F z|| / (1 + ||b||)"""

    dual: float
    """(||C - A*(y) - S||_F + ||c_free - F^T y||) / (1 + ||C||_F)"""

    gap: float
    """|primal objective - dual objective| / (1 + |primal objective|)"""


class IterationRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    iteration: int
    primal_objective: float
    dual_objective: float
    residuals: Residuals
    mu: float
    """<X, S> / total block dimension"""


class SolveReport(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    status: SolverStatus
    primal_objective: float
    dual_objective: float
    X: List[np.ndarray]
    y: np.ndarray
    S: List[np.ndarray]
    z: np.ndarray = Field(default_factory=lambda: np.zeros(0))
    """Values of the free scalars"""

    residuals: Residuals
    iterations: int = 0
    solve_time: float = 0.0
    history: List[IterationRecord] = Field(default_factory=list)
    """One record per iterate, filled in by the interior-point solver"""

    def free_value(self, problem: SdpProblem, label: str) -> float:
        return float(self.z[problem.free_labels.index(label)])


def check_solution(problem: SdpProblem, report: SolveReport) -> Residuals:
    """Recompute the residuals of ``report`` directly from the problem data."""
    m = problem.n_constraints
    F = problem.free_matrix
    primal_value = np.zeros(m)
    for j in range(m):
        for k in range(len(problem.blocks)):
            primal_value[j] += np.sum(problem.constraints[k][j] * report.X[k])
    primal_value += F @ report.z
    rp = problem.rhs - primal_value
    dual_norm_sq = 0.0
    c_norm_sq = 0.0
    for k in range(len(problem.blocks)):
        adjoint = np.zeros_like(problem.objective[k])
        for j in range(m):
            adjoint += report.y[j] * problem.constraints[k][j]
        dual_norm_sq += np.sum((problem.objective[k] - adjoint - report.S[k]) ** 2)
        c_norm_sq += np.sum(problem.objective[k] ** 2)
    rf = problem.free_cost - F.T @ report.y
    pobj = sum(
        np.sum(problem.objective[k] * report.X[k]) for k in range(len(problem.blocks))
    ) + float(problem.free_cost @ report.z)
    dobj = float(problem.rhs @ report.y)
    return Residuals(
        primal=float(np.linalg.norm(rp) / (1 + np.linalg.norm(problem.rhs))),
        dual=float((np.sqrt(dual_norm_sq) + np.linalg.norm(rf)) / (1 + np.sqrt(c_norm_sq))),
        gap=float(abs(pobj - dobj) / (1 + abs(pobj))),
    )

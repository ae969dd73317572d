from chebsos.solvers.problem import (
    Residuals,
    SdpProblem,
    SolveReport,
    SolverOptions,
    SolverStatus,
    check_solution,
)
from chebsos.solvers.solver import Solver
from typing import Optional
import logging
import time

import numpy as np

try:
    import cvxpy as cp

    CVXPY_INSTALLED = True
except ImportError:
    CVXPY_INSTALLED = False

logger = logging.getLogger(__name__)


class CvxpySolver(Solver):
    """Solve through cvxpy and whichever SDP-capable solver it has installed.

    Used to cross-check the built-in interior-point method.

    """

    name = "cvxpy"

    def __init__(self, options: Optional[SolverOptions] = None, backend: Optional[str] = None) -> None:
        if not CVXPY_INSTALLED:
            raise ImportError(
                "cvxpy extra dependencies are not installed. Use poetry install -E cvxpy"
            )
        super().__init__(options)
        self.backend = backend

    def solve(self, problem: SdpProblem) -> SolveReport:
        self.n_solves += 1
        start = time.monotonic()
        m = problem.n_constraints
        X = [cp.Variable((b.dim, b.dim), PSD=True) for b in problem.blocks]
        z = cp.Variable(problem.n_free) if problem.n_free else None
        lhs = 0
        for a, x, block in zip(problem.constraints, X, problem.blocks):
            lhs = lhs + a.reshape(m, -1) @ cp.reshape(x, (block.dim**2,), order="C")
        objective = sum(cp.sum(cp.multiply(c, x)) for c, x in zip(problem.objective, X))
        if z is not None:
            lhs = lhs + problem.free_matrix @ z
            objective = objective + problem.free_cost @ z
        equality = lhs == problem.rhs
        cvx_problem = cp.Problem(cp.Minimize(objective), [equality])
        try:
            cvx_problem.solve(solver=self.backend)
        except cp.error.SolverError as e:
            logger.error(f"cvxpy failed: {e}")
            return self._failed(problem, SolverStatus.NUMERICAL_FAILURE, start)

        status = {
            cp.OPTIMAL: SolverStatus.OPTIMAL,
            cp.OPTIMAL_INACCURATE: SolverStatus.NEAR_OPTIMAL,
            cp.INFEASIBLE: SolverStatus.INFEASIBLE,
            cp.INFEASIBLE_INACCURATE: SolverStatus.INFEASIBLE,
            cp.UNBOUNDED: SolverStatus.INFEASIBLE,
            cp.UNBOUNDED_INACCURATE: SolverStatus.INFEASIBLE,
        }.get(cvx_problem.status, SolverStatus.NUMERICAL_FAILURE)
        if status not in (SolverStatus.OPTIMAL, SolverStatus.NEAR_OPTIMAL):
            return self._failed(problem, status, start)

        # cvxpy's multiplier enters the Lagrangian with the opposite sign
        y = -np.asarray(equality.dual_value, dtype=float).reshape(m)
        X_values = [np.asarray(x.value, dtype=float) for x in X]
        X_values = [(v + v.T) / 2 for v in X_values]
        S_values = [
            c - np.tensordot(y, a, axes=1)
            for c, a in zip(problem.objective, problem.constraints)
        ]
        z_value = np.asarray(z.value, dtype=float) if z is not None else np.zeros(0)
        report = SolveReport(
            status=status,
            primal_objective=float(cvx_problem.value),
            dual_objective=float(problem.rhs @ y),
            X=X_values,
            y=y,
            S=S_values,
            z=z_value,
            residuals=Residuals(primal=0.0, dual=0.0, gap=0.0),
            solve_time=time.monotonic() - start,
        )
        return report.model_copy(update={"residuals": check_solution(problem, report)})

    def _failed(self, problem: SdpProblem, status: SolverStatus, start: float) -> SolveReport:
        nan = float("nan")
        return SolveReport(
            status=status,
            primal_objective=nan,
            dual_objective=nan,
            X=[np.zeros((b.dim, b.dim)) for b in problem.blocks],
            y=np.zeros(problem.n_constraints),
            S=[np.zeros((b.dim, b.dim)) for b in problem.blocks],
            z=np.zeros(problem.n_free),
            residuals=Residuals(primal=nan, dual=nan, gap=nan),
            solve_time=time.monotonic() - start,
        )

"""Primal-dual interior-point method for dense block-diagonal SDPs.

The search direction is the HKM direction with Mehrotra's predictor-corrector.
Free scalars are eliminated through the Schur complement system

    M dy + F dz = h,    F^T dy = r_free,

with M_ij = sum_k <A_ik, X_k A_jk S_k^-1>.
"""
from chebsos.solvers.problem import (
    IterationRecord,
    Residuals,
    SdpProblem,
    SolveReport,
    SolverOptions,
    SolverStatus,
)
from chebsos.solvers.solver import Solver
from scipy import linalg
from typing import List, Optional, Sequence, Tuple
import logging
import time

import numpy as np

logger = logging.getLogger(__name__)

# Objective magnitudes beyond this (relative to the data) are read as diverging
DIVERGENCE_THRESHOLD = 1e8

# Step lengths below this on both sides mean the iteration has stalled
STALL_STEP = 1e-10


class FactorizationError(Exception):
    """A matrix stayed indefinite after every regularization shift."""

    pass


def _inner(a: Sequence[np.ndarray], b: Sequence[np.ndarray]) -> float:
    return float(sum(np.sum(ak * bk) for ak, bk in zip(a, b)))


def _frobenius(a: Sequence[np.ndarray]) -> float:
    return float(np.sqrt(sum(np.sum(ak**2) for ak in a)))


def _sym(a: np.ndarray) -> np.ndarray:
    return (a + a.T) / 2


class _Operator:
    """A(X) and its adjoint for one problem, with flattened constraint blocks."""

    def __init__(self, problem: SdpProblem) -> None:
        self.m = problem.n_constraints
        self.constraints = problem.constraints
        self.flat = [a.reshape(self.m, -1) for a in problem.constraints]
        self.F = problem.free_matrix

    def apply(self, X: Sequence[np.ndarray]) -> np.ndarray:
        return sum(flat @ x.ravel() for flat, x in zip(self.flat, X))

    def adjoint(self, y: np.ndarray) -> List[np.ndarray]:
        return [np.tensordot(y, a, axes=1) for a in self.constraints]

    def schur(self, X: Sequence[np.ndarray], Sinv: Sequence[np.ndarray]) -> np.ndarray:
        M = np.zeros((self.m, self.m))
        for a, flat, x, sinv in zip(self.constraints, self.flat, X, Sinv):
            G = x @ a @ sinv
            M += flat @ G.reshape(self.m, -1).T
        return _sym(M)


def _factor(matrix: np.ndarray, ladder: Sequence[float]):
    """Cholesky factor of ``matrix``, shifting the diagonal along ``ladder`` if needed."""
    try:
        return linalg.cho_factor(matrix)
    except linalg.LinAlgError:
        pass
    scale = max(1.0, float(np.abs(np.diag(matrix)).max(initial=0.0)))
    for delta in ladder:
        logger.debug(f"Factorization failed, regularizing with {delta:.0e}")
        try:
            return linalg.cho_factor(matrix + delta * scale * np.eye(matrix.shape[0]))
        except linalg.LinAlgError:
            continue
    raise FactorizationError(f"Matrix of size {matrix.shape[0]} is not positive definite.")


def _max_step(X: Sequence[np.ndarray], dX: Sequence[np.ndarray]) -> float:
    """Largest alpha with X + alpha dX positive semidefinite, capped at a large value."""
    alpha = np.inf
    for x, dx in zip(X, dX):
        if x.shape[0] == 1:
            if dx[0, 0] < 0:
                alpha = min(alpha, -x[0, 0] / dx[0, 0])
            continue
        L = linalg.cholesky(x, lower=True)
        W = linalg.solve_triangular(L, dx, lower=True)
        W = linalg.solve_triangular(L, W.T, lower=True)
        smallest = linalg.eigvalsh(_sym(W))[0]
        if smallest < 0:
            alpha = min(alpha, -1.0 / smallest)
    return min(alpha, 1e10)


class InteriorPointSolver(Solver):
    """Infeasible-start primal-dual interior-point solver.

    Parameters
    ----------
    options : SolverOptions, optional
        Tolerances, iteration cap and time limit. Defaults come from
        :class:`chebsos.config.Settings`.

    Examples
    --------
    >>> from chebsos.solvers import SdpProblemBuilder
    >>> builder = SdpProblemBuilder(1)
    >>> k = builder.add_block("X", 1)
    >>> builder.add_objective_entry(k, 0, 0, 1.0)
    >>> builder.add_constraint_entry(0, k, 0, 0, 1.0)
    >>> builder.set_rhs(0, 3.0)
    >>> report = InteriorPointSolver().solve(builder.build())
    >>> report.status.value, round(report.primal_objective, 6)
    ('optimal', 3.0)

    """

    name = "interior-point"

    def solve(self, problem: SdpProblem) -> SolveReport:
        self.n_solves += 1
        options = self.options
        start = time.monotonic()
        op = _Operator(problem)
        F, b, C, c_free = op.F, problem.rhs, problem.objective, problem.free_cost
        N = problem.total_dim
        b_norm = float(np.linalg.norm(b))
        c_norm = _frobenius(C)

        X, y, S, z = self._initial_point(problem, op)
        status = SolverStatus.MAX_ITERATIONS
        iteration = 0
        history = []
        for iteration in range(options.max_iterations + 1):
            rp = b - op.apply(X) - F @ z
            AtY = op.adjoint(y)
            Rd = [c - aty - s for c, aty, s in zip(C, AtY, S)]
            rf = c_free - F.T @ y
            pobj = _inner(C, X) + float(c_free @ z)
            dobj = float(b @ y)
            residuals = Residuals(
                primal=float(np.linalg.norm(rp) / (1 + b_norm)),
                dual=float((_frobenius(Rd) + np.linalg.norm(rf)) / (1 + c_norm)),
                gap=float(abs(pobj - dobj) / (1 + abs(pobj))),
            )
            mu = _inner(X, S) / N
            history.append(
                IterationRecord(
                    iteration=iteration,
                    primal_objective=pobj,
                    dual_objective=dobj,
                    residuals=residuals,
                    mu=mu,
                )
            )
            logger.debug(
                f"iter {iteration:3d}  pobj {pobj:+.8e}  dobj {dobj:+.8e}  "
                f"pres {residuals.primal:.1e}  dres {residuals.dual:.1e}  mu {mu:.1e}"
            )
            if self._converged(residuals, mu * N / (1 + abs(pobj)), 1.0):
                status = SolverStatus.OPTIMAL
                break
            if dobj > DIVERGENCE_THRESHOLD * (1 + c_norm) or pobj < -DIVERGENCE_THRESHOLD * (
                1 + b_norm
            ):
                status = SolverStatus.INFEASIBLE
                break
            if options.time_limit is not None and time.monotonic() - start > options.time_limit:
                status = SolverStatus.TIME_LIMIT
                break
            if iteration == options.max_iterations:
                break

            try:
                step = self._step(op, X, S, z, y, rp, Rd, rf, mu, N)
            except (FactorizationError, linalg.LinAlgError, ValueError) as e:
                logger.debug(f"Stopping at iteration {iteration}: {e}")
                status = SolverStatus.NUMERICAL_FAILURE
                break
            dX, dy, dS, dz, alpha_p, alpha_d = step
            if alpha_p < STALL_STEP and alpha_d < STALL_STEP:
                status = SolverStatus.NUMERICAL_FAILURE
                break
            X = [x + alpha_p * dx for x, dx in zip(X, dX)]
            z = z + alpha_p * dz
            y = y + alpha_d * dy
            S = [s + alpha_d * ds for s, ds in zip(S, dS)]

        complementarity = _inner(X, S) / (1 + abs(pobj))
        if status in (
            SolverStatus.MAX_ITERATIONS,
            SolverStatus.NUMERICAL_FAILURE,
        ) and self._converged(residuals, complementarity, options.near_optimal_factor):
            status = SolverStatus.NEAR_OPTIMAL
        elapsed = time.monotonic() - start
        logger.info(
            f"Interior point finished with status {status.value} after {iteration} iterations "
            f"({elapsed:.2f}s): pobj {pobj:.10g}, dobj {dobj:.10g}"
        )
        return SolveReport(
            status=status,
            primal_objective=pobj,
            dual_objective=dobj,
            X=X,
            y=y,
            S=S,
            z=z,
            residuals=residuals,
            iterations=iteration,
            solve_time=elapsed,
            history=history,
        )

    def _converged(self, residuals: Residuals, complementarity: float, factor: float) -> bool:
        options = self.options
        return (
            residuals.primal <= factor * options.tolerance
            and residuals.dual <= factor * options.tolerance
            and residuals.gap <= factor * options.gap_tolerance
            and complementarity <= factor * options.gap_tolerance
        )

    def _initial_point(self, problem: SdpProblem, op: _Operator):
        N = problem.total_dim
        root = np.sqrt(N)
        a_norms = np.sqrt(
            sum(np.sum(a**2, axis=(1, 2)) for a in problem.constraints)
        )
        xi = max(10.0, root, root * float(np.max((1 + np.abs(problem.rhs)) / (1 + a_norms))))
        eta = max(10.0, root, _frobenius(problem.objective), float(a_norms.max()))
        X = [xi * np.eye(block.dim) for block in problem.blocks]
        S = [eta * np.eye(block.dim) for block in problem.blocks]
        y = np.zeros(problem.n_constraints)
        z = np.zeros(problem.n_free)
        return X, y, S, z

    def _direction(
        self,
        op: _Operator,
        factors: Tuple,
        X: List[np.ndarray],
        Sinv: List[np.ndarray],
        rp: np.ndarray,
        Rd: List[np.ndarray],
        rf: np.ndarray,
        Rc: List[np.ndarray],
    ):
        M_factor, W, K_factor = factors
        h = rp - op.apply([rc - x @ rd @ si for rc, x, rd, si in zip(Rc, X, Rd, Sinv)])
        if K_factor is None:
            dz = np.zeros(0)
            dy = linalg.cho_solve(M_factor, h)
        else:
            Minv_h = linalg.cho_solve(M_factor, h)
            dz = linalg.cho_solve(K_factor, op.F.T @ Minv_h - rf)
            dy = Minv_h - W @ dz
        dS = [rd - aty for rd, aty in zip(Rd, op.adjoint(dy))]
        dX = [_sym(rc - x @ ds @ si) for rc, x, ds, si in zip(Rc, X, dS, Sinv)]
        return dX, dy, dS, dz

    def _step(self, op, X, S, z, y, rp, Rd, rf, mu, N):
        options = self.options
        Sinv = [linalg.inv(s) if s.shape[0] > 1 else 1.0 / s for s in S]
        Sinv = [_sym(si) for si in Sinv]
        M_factor = _factor(op.schur(X, Sinv), options.regularization)
        if op.F.shape[1]:
            W = linalg.cho_solve(M_factor, op.F)
            K_factor = _factor(_sym(op.F.T @ W), options.regularization)
        else:
            W, K_factor = None, None
        factors = (M_factor, W, K_factor)

        # Predictor: aim at mu = 0
        Rc = [-x for x in X]
        dX, dy, dS, dz = self._direction(op, factors, X, Sinv, rp, Rd, rf, Rc)
        alpha_p = min(1.0, _max_step(X, dX))
        alpha_d = min(1.0, _max_step(S, dS))
        mu_aff = (
            _inner(
                [x + alpha_p * dx for x, dx in zip(X, dX)],
                [s + alpha_d * ds for s, ds in zip(S, dS)],
            )
            / N
        )
        sigma = min(1.0, max(0.0, mu_aff / mu)) ** 3 if mu > 0 else 0.0

        # Corrector with centering and the second-order term
        Rc = [
            sigma * mu * si - x - dx @ ds @ si
            for si, x, dx, ds in zip(Sinv, X, dX, dS)
        ]
        dX, dy, dS, dz = self._direction(op, factors, X, Sinv, rp, Rd, rf, Rc)
        alpha_p = min(1.0, options.step_fraction * _max_step(X, dX))
        alpha_d = min(1.0, options.step_fraction * _max_step(S, dS))
        logger.debug(f"sigma {sigma:.2e}  steps {alpha_p:.3f} {alpha_d:.3f}")
        return dX, dy, dS, dz, alpha_p, alpha_d


def solve(problem: SdpProblem, options: Optional[SolverOptions] = None) -> SolveReport:
    """Solve ``problem`` with the built-in interior-point method."""
    return InteriorPointSolver(options).solve(problem)

from chebsos.solvers.problem import SdpProblem, SolveReport, SolverOptions
from abc import ABC, abstractmethod
from typing import Optional


class Solver(ABC):
    """Backend that solves an :class:`SdpProblem` and reports a status instead of raising."""

    name = "solver"

    def __init__(self, options: Optional[SolverOptions] = None) -> None:
        self.options = options or SolverOptions.from_settings()
        self.n_solves = 0

    @abstractmethod
    def solve(self, problem: SdpProblem) -> SolveReport:
        pass

    def reset(self):
        self.n_solves = 0

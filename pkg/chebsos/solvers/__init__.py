from .problem import (
    Block,
    IterationRecord,
    Residuals,
    SdpProblem,
    SdpProblemBuilder,
    SolveReport,
    SolverError,
    SolverOptions,
    SolverStatus,
    SolverTimeLimit,
    check_solution,
)
from .solver import Solver
from .interior_point import InteriorPointSolver, solve
from .external import CvxpySolver
from .sdpa import read_sdpa, sdpa_text, write_sdpa

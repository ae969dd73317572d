"""Sparse SDPA text export of :class:`SdpProblem` for cross-checking with external solvers.

The problem is written in SDPA's dual form with F_0 = -C, F_j = A_j and
c = b. Free scalars become pairs z = z+ - z- of nonnegative entries in a
trailing diagonal block, announced by a ``* free:`` header comment. Floats are
written with ``repr`` so a written file reads back to the same arrays.
"""
from chebsos.solvers.problem import Block, SdpProblem
from pathlib import Path
from typing import Dict, List, Union
import logging
import re

import numpy as np

logger = logging.getLogger(__name__)


def _entries(matrix: np.ndarray):
    rows, cols = np.nonzero(np.triu(matrix))
    for row, col in zip(rows, cols):
        yield int(row), int(col), float(matrix[row, col])


def _free_block(problem: SdpProblem, j: int) -> np.ndarray:
    f = problem.n_free
    if j == 0:
        diagonal = np.concatenate([-problem.free_cost, problem.free_cost])
    else:
        column = problem.free_matrix[j - 1]
        diagonal = np.concatenate([column, -column])
    return np.diag(diagonal) if f else np.zeros((0, 0))


def sdpa_text(problem: SdpProblem) -> str:
    m, f = problem.n_constraints, problem.n_free
    lines = ["* chebsos semidefinite program"]
    lines.append("* blocks: " + " ".join(block.label for block in problem.blocks))
    if f:
        lines.append("* free: " + " ".join(problem.free_labels))
    dims = [str(block.dim) for block in problem.blocks]
    if f:
        dims.append(str(-2 * f))
    lines.append(str(m))
    lines.append(str(len(dims)))
    lines.append(" ".join(dims))
    lines.append(" ".join(repr(float(v)) for v in problem.rhs))
    for j in range(m + 1):
        for k in range(len(problem.blocks)):
            matrix = -problem.objective[k] if j == 0 else problem.constraints[k][j - 1]
            for row, col, value in _entries(matrix):
                lines.append(f"{j} {k + 1} {row + 1} {col + 1} {value!r}")
        if f:
            for row, col, value in _entries(_free_block(problem, j)):
                lines.append(f"{j} {len(problem.blocks) + 1} {row + 1} {col + 1} {value!r}")
    return "\n".join(lines) + "\n"


def write_sdpa(problem: SdpProblem, path: Union[str, Path]):
    Path(path).write_text(sdpa_text(problem))
    logger.debug(f"Wrote SDPA file {path}")


def read_sdpa(path: Union[str, Path]) -> SdpProblem:
    """Read a sparse SDPA file, including the free-scalar block written by :func:`write_sdpa`."""
    header: Dict[str, List[str]] = {}
    body: List[str] = []
    for line in Path(path).read_text().splitlines():
        stripped = line.strip()
        if not stripped:
            continue
        if stripped[0] in "*\"":
            match = re.match(r"[*\"]\s*(blocks|free):(.*)", stripped)
            if match:
                header[match.group(1)] = match.group(2).split()
            continue
        body.append(stripped)
    try:
        m = int(body[0])
        n_blocks = int(body[1])
        dims = [int(d) for d in re.sub(r"[{},()]", " ", body[2]).split()]
        rhs = np.array([float(v) for v in re.sub(r"[{},()]", " ", body[3]).split()])
    except (IndexError, ValueError) as e:
        raise ValueError(f"Malformed SDPA header in {path}: {e}")
    if len(dims) != n_blocks or rhs.shape[0] != m:
        raise ValueError(f"SDPA header of {path} is inconsistent.")

    free_labels = header.get("free", [])
    f = len(free_labels)
    psd_dims = [abs(d) for d in (dims[:-1] if f else dims)]
    labels = header.get("blocks") or [f"B{k + 1}" for k in range(len(psd_dims))]
    objective = [np.zeros((d, d)) for d in psd_dims]
    constraints = [np.zeros((m, d, d)) for d in psd_dims]
    free_cost = np.zeros(f)
    free_constraints = np.zeros((m, f)) if f else None
    for line in body[4:]:
        parts = line.split()
        j, k, row, col = (int(p) for p in parts[:4])
        value = float(parts[4])
        k, row, col = k - 1, row - 1, col - 1
        if f and k == len(psd_dims):
            # Only the z+ half of the pair carries information
            if row == col and row < f:
                if j == 0:
                    free_cost[row] = -value
                else:
                    free_constraints[j - 1, row] = value
            continue
        target = objective[k] if j == 0 else constraints[k][j - 1]
        sign = -1.0 if j == 0 else 1.0
        target[row, col] = sign * value
        target[col, row] = sign * value
    return SdpProblem(
        blocks=[Block(label=label, dim=d) for label, d in zip(labels, psd_dims)],
        objective=objective,
        constraints=constraints,
        rhs=rhs,
        free_cost=free_cost,
        free_constraints=free_constraints,
        free_labels=free_labels,
    )

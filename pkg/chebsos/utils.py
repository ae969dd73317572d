from chebsos.poly import Poly
from scipy.optimize import minimize
from typing import Tuple
import logging

import numpy as np

logger = logging.getLogger(__name__)

# Grids larger than this are thinned out per axis
MAX_GRID_POINTS = 2_000_000


def hypercube_grid(n: int, points_per_axis: int) -> np.ndarray:
    """Tensor grid of [-1, 1]^n as an (points_per_axis**n, n) array."""
    axis = np.linspace(-1.0, 1.0, points_per_axis)
    mesh = np.meshgrid(*([axis] * n), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def estimate_minimum(
    f: Poly, points_per_axis: int = 201, n_starts: int = 5
) -> Tuple[float, np.ndarray]:
    """Estimate min f over [-1, 1]^n without any semidefinite programming.

    Parameters
    ----------
    f : Poly
        Polynomial in any basis.
    points_per_axis : int, optional
        Grid resolution per axis. Reduced automatically when the full grid
        would exceed ``MAX_GRID_POINTS``.
    n_starts : int, optional
        Number of best grid points refined by bounded L-BFGS-B.

    Returns
    -------
    The smallest value found and the point attaining it. The value is an
    upper bound on the true minimum.

    """
    n = f.nvars
    while points_per_axis**n > MAX_GRID_POINTS and points_per_axis > 3:
        points_per_axis = (points_per_axis + 1) // 2
    grid = hypercube_grid(n, points_per_axis)
    values = f(grid)
    order = np.argsort(values)
    best_value = float(values[order[0]])
    best_point = grid[order[0]]
    bounds = [(-1.0, 1.0)] * n
    for start in grid[order[:n_starts]]:
        result = minimize(
            lambda x: float(f(x)),
            start,
            method="L-BFGS-B",
            bounds=bounds,
        )
        if result.fun < best_value:
            best_value = float(result.fun)
            best_point = np.clip(result.x, -1.0, 1.0)
    logger.debug(f"Grid minimum of {f.nvars}-variate polynomial: {best_value}")
    return best_value, best_point

from chebsos.config import get_settings
from chebsos.solvers import SolverError, SolverOptions, SolverTimeLimit
from chebsos.sos_compiler import theta_upper_bound
from pydantic import BaseModel, ConfigDict, Field, field_validator
from concurrent.futures import ProcessPoolExecutor, as_completed
from enum import Enum
from pathlib import Path
from tqdm import tqdm
from typing import List, Optional, Tuple
import logging
import time

import pandas as pd

logger = logging.getLogger(__name__)

TIMEOUT_MARK = "—"
ERROR_MARK = "ERR"


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


class CellStatus(str, Enum):
    OK = "ok"
    TIMEOUT = "timeout"
    ERROR = "error"


class TableSpec(BaseModel):
    """Which Θ cells to compute and where to write them."""

    n: int = Field(gt=0)
    d_range: List[int]
    r_range: List[int]
    output_path: Optional[Path] = None
    format: OutputFormat = OutputFormat.CSV
    jobs: int = Field(1, ge=1)
    time_budget: float = Field(default_factory=lambda: get_settings().time_budget, gt=0)

    @field_validator("d_range", "r_range")
    @classmethod
    def _check_range(cls, values: List[int]) -> List[int]:
        if not values:
            raise ValueError("Ranges must not be empty.")
        if min(values) < 1:
            raise ValueError("Degrees must be at least 1.")
        return sorted(set(values))

    def cells(self) -> List[Tuple[int, int]]:
        """(d, r) pairs with d <= r, ordered by r then d."""
        return [(d, r) for r in self.r_range for d in self.d_range if d <= r]


class ThetaCell(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int
    d: int
    r: int
    status: CellStatus
    bound: Optional[float] = None
    jackson_gap: Optional[float] = None
    analytic_bound: Optional[float] = None
    seconds: float = 0.0
    error: Optional[str] = None

    def display(self) -> str:
        if self.status == CellStatus.OK:
            return f"{self.bound:.4f}"
        if self.status == CellStatus.TIMEOUT:
            return TIMEOUT_MARK
        return ERROR_MARK


def _evaluate_cell(n: int, d: int, r: int, options: SolverOptions) -> ThetaCell:
    start = time.monotonic()
    try:
        result = theta_upper_bound(n, d, r, options=options)
    except SolverTimeLimit as e:
        return ThetaCell(
            n=n, d=d, r=r, status=CellStatus.TIMEOUT, seconds=time.monotonic() - start, error=str(e)
        )
    except SolverError as e:
        return ThetaCell(
            n=n, d=d, r=r, status=CellStatus.ERROR, seconds=time.monotonic() - start, error=str(e)
        )
    return ThetaCell(
        n=n,
        d=d,
        r=r,
        status=CellStatus.OK,
        bound=result.bound,
        jackson_gap=result.jackson_gap,
        analytic_bound=result.analytic_bound,
        seconds=time.monotonic() - start,
    )


class ThetaTableBuilder:
    """Compute tables of the Θ^r_{n,d} upper bounds.

    Parameters
    ----------
    options : SolverOptions, optional
        Solver settings; the time limit is replaced by each spec's time budget.
    silent : bool, optional
        If True, failed cells are logged and marked "ERR" instead of raising.
        Default is False.
    progress : bool, optional
        Show a tqdm progress bar. Default is True.

    Examples
    --------
    >>> builder = ThetaTableBuilder(silent=True, progress=False)
    >>> table = builder.build(TableSpec(n=1, d_range=[1, 2], r_range=[1, 2]))
    >>> table.loc[2, 2]
    '0.5556'

    """

    def __init__(
        self,
        options: Optional[SolverOptions] = None,
        silent: Optional[bool] = False,
        progress: Optional[bool] = True,
    ):
        self.options = options or SolverOptions.from_settings()
        self.silent = silent
        self.progress = progress
        self.cells: List[ThetaCell] = []

    def build(self, spec: TableSpec) -> pd.DataFrame:
        """Evaluate every cell of ``spec``, write the output file if requested and return the table.

        Returns
        -------
        DataFrame indexed by r with one column per d. Cells hold the bound to
        four decimals, "—" on timeout, "ERR" on solver failure and "" where d > r.

        """
        options = self.options.model_copy(update={"time_limit": spec.time_budget})
        pairs = spec.cells()
        cells = []
        if spec.jobs > 1 and len(pairs) > 1:
            with ProcessPoolExecutor(max_workers=spec.jobs) as executor:
                futures = [
                    executor.submit(_evaluate_cell, spec.n, d, r, options) for d, r in pairs
                ]
                for future in tqdm(
                    as_completed(futures),
                    total=len(futures),
                    desc=f"Theta n={spec.n}",
                    disable=not self.progress,
                ):
                    cells.append(self._check(future.result()))
        else:
            for d, r in tqdm(pairs, desc=f"Theta n={spec.n}", disable=not self.progress):
                cells.append(self._check(_evaluate_cell(spec.n, d, r, options)))
        # Collect-then-write keeps the output independent of completion order
        self.cells = sorted(cells, key=lambda c: (c.r, c.d))
        table = self._to_frame(spec)
        if spec.output_path is not None:
            self.write(table, spec)
        return table

    def _check(self, cell: ThetaCell) -> ThetaCell:
        logger.debug(f"Cell n={cell.n} d={cell.d} r={cell.r}: {cell.status.value} in {cell.seconds:.2f}s")
        if cell.status == CellStatus.ERROR:
            if self.silent:
                logger.error(f"Cell n={cell.n} d={cell.d} r={cell.r}: {cell.error}")
            else:
                raise SolverError(cell.error)
        return cell

    @property
    def has_errors(self) -> bool:
        return any(cell.status == CellStatus.ERROR for cell in self.cells)

    def _to_frame(self, spec: TableSpec) -> pd.DataFrame:
        table = pd.DataFrame("", index=spec.r_range, columns=spec.d_range, dtype=object)
        for cell in self.cells:
            table.loc[cell.r, cell.d] = cell.display()
        table.index.name = "r"
        table.columns.name = "d"
        return table

    def write(self, table: pd.DataFrame, spec: TableSpec):
        path = Path(spec.output_path)
        if spec.format == OutputFormat.CSV:
            table.to_csv(path)
        else:
            records = pd.DataFrame([cell.model_dump(mode="json") for cell in self.cells])
            records.to_json(path, orient="records", indent=2)
        logger.info(f"Wrote {len(self.cells)} cells to {path}")


def theta_table(
    n: int,
    d_range: List[int],
    r_range: List[int],
    jobs: int = 1,
    time_budget: Optional[float] = None,
    silent: Optional[bool] = False,
) -> pd.DataFrame:
    """Convenience wrapper around :class:`ThetaTableBuilder` for a single table."""
    values = dict(n=n, d_range=d_range, r_range=r_range, jobs=jobs)
    if time_budget is not None:
        values["time_budget"] = time_budget
    return ThetaTableBuilder(silent=silent, progress=False).build(TableSpec(**values))

import concurrent.futures
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np
from rich.console import Console
from rich.progress import (
    BarColumn,
    Progress,
    SpinnerColumn,
    TaskProgressColumn,
    TextColumn,
)

from agp_tomography.constants import DEFAULT_WORKERS
from agp_tomography.exceptions import EmptySectorError
from agp_tomography.rdm import (
    ENSEMBLE,
    CondensationReport,
    GeminalMatrix,
    Sector,
    condensation_verdict,
    sector_label,
    unavailable_report,
)


@dataclass(frozen=True)
class SweepRow:
    """One (r, sector) row of a sweep with the seed its sampling uses."""

    index: int
    num_qubits: int
    sector: Sector
    seed: int

    @property
    def name(self) -> str:
        return f"r={self.num_qubits} {sector_label(self.sector)}"


@dataclass(frozen=True)
class SweepResult:
    row: SweepRow
    report: CondensationReport
    geminal: GeminalMatrix | None = None


class GeminalBackend(ABC):
    """
    Abstract Base Class for producing geminal matrices of the extreme AGP state.
    Handles the per-row bookkeeping and the parallel sweep runner.
    """

    MODE = ""

    def __init__(
        self, workers: int = DEFAULT_WORKERS, console: Console | None = None
    ) -> None:
        self.workers = max(1, workers)
        self.console = console
        self.logger = logging.getLogger(__name__)

    @abstractmethod
    def geminal_matrix(self, num_qubits: int, sector: Sector, seed: int) -> GeminalMatrix:
        """
        Build K for one row.
        Raises EmptySectorError when the sector carries no weight or no readouts.
        """

    def evaluate_row(self, row: SweepRow) -> SweepResult:
        """Evaluate one row; an empty sector yields a flagged, unavailable report."""
        if row.num_qubits == 0 and row.sector in (ENSEMBLE, 0):
            empty = GeminalMatrix(np.zeros((0, 0), dtype=np.complex128))
            return SweepResult(row, condensation_verdict(0, row.sector, empty), empty)
        try:
            geminal = self.geminal_matrix(row.num_qubits, row.sector, row.seed)
        except EmptySectorError as e:
            self.logger.warning(f"Sector unavailable for {row.name}: {e}")
            return SweepResult(row, unavailable_report(row.num_qubits, row.sector))
        report = condensation_verdict(row.num_qubits, row.sector, geminal)
        self.logger.info(f"{row.name}: lambda_D={report.lambda_D:.6f}")
        return SweepResult(row, report, geminal)

    def run_sweep(self, rows: list[SweepRow]) -> list[SweepResult]:
        """
        Evaluate all rows in parallel with a progress bar.
        Results come back in row order whatever the completion order.
        """
        results: list[SweepResult | None] = [None] * len(rows)
        with Progress(
            SpinnerColumn(),
            TextColumn("[progress.description]{task.description}"),
            BarColumn(),
            TaskProgressColumn(),
            console=self.console,
            transient=True,
        ) as progress:
            task = progress.add_task(
                f"Sweeping {len(rows)} row(s) ({self.MODE})", total=len(rows)
            )

            with concurrent.futures.ThreadPoolExecutor(max_workers=self.workers) as executor:
                futures = {
                    executor.submit(self.evaluate_row, row): position
                    for position, row in enumerate(rows)
                }

                # Process results as they complete
                for future in concurrent.futures.as_completed(futures):
                    progress.advance(task)
                    position = futures[future]
                    try:
                        results[position] = future.result()
                    except Exception as e:
                        self.logger.error(f"Error evaluating {rows[position].name}: {e}")
                        raise

        self.logger.info(f"Sweep complete: {len(rows)} row(s) in {self.MODE} mode")
        return [result for result in results if result is not None]


def check_sector(num_qubits: int, sector: Sector) -> None:
    """Raise EmptySectorError for particle numbers the register cannot hold."""
    if sector == ENSEMBLE:
        return
    n_particles = int(sector)
    if not 0 <= n_particles <= num_qubits:
        raise EmptySectorError(
            f"N={n_particles} is outside [0, {num_qubits}] for r={num_qubits}"
        )

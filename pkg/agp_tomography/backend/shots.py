import threading

import numpy as np
from rich.console import Console

from agp_tomography.backend.base import GeminalBackend, check_sector
from agp_tomography.constants import DEFAULT_SHOTS, DEFAULT_WORKERS
from agp_tomography.exceptions import EmptySectorError, SectorUnavailableError
from agp_tomography.rdm import ENSEMBLE, GeminalMatrix, Sector, assemble_from_shots
from agp_tomography.statevector import (
    Histogram,
    NoiseModel,
    agp_circuit,
    new_zero_state,
    sample_shots,
)
from agp_tomography.tomography import (
    MeasurementSetting,
    estimates_from_histograms,
    plan_settings,
)


class ShotBackend(GeminalBackend):
    """
    K estimated from sampled readouts of every measurement setting.

    Each setting runs preparation + rotation from the vacuum, so gate noise hits
    the preparation too. Readouts are sampled once per (r, seed); the ensemble
    row uses them whole and each fixed-N row post-selects them on the decoded
    particle number.
    """

    MODE = "shots"

    def __init__(
        self,
        shots: int = DEFAULT_SHOTS,
        noise: NoiseModel | None = None,
        workers: int = DEFAULT_WORKERS,
        console: Console | None = None,
    ) -> None:
        super().__init__(workers, console)
        self.shots = shots
        self.noise = noise
        self._histograms: dict[tuple[int, int], list[tuple[MeasurementSetting, Histogram]]] = {}
        self._locks: dict[tuple[int, int], threading.Lock] = {}
        self._guard = threading.Lock()

    def collect_histograms(
        self, num_qubits: int, seed: int
    ) -> list[tuple[MeasurementSetting, Histogram]]:
        """Sample every setting; per-setting seeds are spawned from the row seed."""
        settings = plan_settings(num_qubits)
        prep = agp_circuit(num_qubits)
        vacuum = new_zero_state(num_qubits)
        children = np.random.SeedSequence(seed).spawn(len(settings))
        histograms = []
        for setting, child in zip(settings, children):
            histogram = sample_shots(
                vacuum,
                prep + setting.rotation,
                self.shots,
                self.noise,
                seed=int(child.generate_state(1)[0]),
            )
            histograms.append((setting, histogram))
        self.logger.debug(
            f"Sampled {len(settings)} settings x {self.shots} shots for r={num_qubits}"
        )
        return histograms

    def histograms_for(
        self, num_qubits: int, seed: int
    ) -> list[tuple[MeasurementSetting, Histogram]]:
        """Readouts for (r, seed), sampled on first use and shared by every sector."""
        key = (num_qubits, seed)
        with self._guard:
            lock = self._locks.setdefault(key, threading.Lock())
        with lock:
            if key not in self._histograms:
                self._histograms[key] = self.collect_histograms(num_qubits, seed)
            return self._histograms[key]

    def geminal_matrix(self, num_qubits: int, sector: Sector, seed: int) -> GeminalMatrix:
        check_sector(num_qubits, sector)
        n_filter = None if sector == ENSEMBLE else int(sector)
        estimates = estimates_from_histograms(
            self.histograms_for(num_qubits, seed), n_filter
        )
        try:
            return assemble_from_shots(num_qubits // 2, estimates)
        except SectorUnavailableError as e:
            raise EmptySectorError(str(e)) from e

from agp_tomography.backend.base import GeminalBackend, check_sector
from agp_tomography.exceptions import EmptySectorError
from agp_tomography.rdm import ENSEMBLE, GeminalMatrix, Sector, assemble_exact
from agp_tomography.statevector import prepare_agp, project_particle_number


class ExactBackend(GeminalBackend):
    """
    Noise-free K from the prepared statevector (the shots -> infinity limit).
    Fixed-N rows project the state onto the sector before assembling.
    """

    MODE = "exact"

    def geminal_matrix(self, num_qubits: int, sector: Sector, seed: int) -> GeminalMatrix:
        check_sector(num_qubits, sector)
        state = prepare_agp(num_qubits)
        if sector != ENSEMBLE:
            projection = project_particle_number(state, int(sector))
            if projection.state is None:
                raise EmptySectorError(
                    f"N={sector} has zero weight in the r={num_qubits} AGP state"
                )
            state = projection.state
        return assemble_exact(state)

"""Brute-force two-body reduced density matrix and closed-form references.

The oracle works directly on basis-state bit patterns with fermionic ladder
operators (parity signs counted bit by bit) and never touches the Pauli layer,
so it can cross-check the Jordan-Wigner expansions.
"""

import csv
import logging
from dataclasses import dataclass, field
from math import comb
from pathlib import Path

import numpy as np
import numpy.typing as npt

from agp_tomography.constants import ORACLE_MAX_QUBITS
from agp_tomography.exceptions import CapacityError, OutputError, ValidationError
from agp_tomography.pairing import FermionOp
from agp_tomography.rdm import ENSEMBLE, GeminalMatrix, Sector, largest_eigenvalue
from agp_tomography.statevector import StateVector

logger = logging.getLogger(__name__)

ComplexArray = npt.NDArray[np.complex128]
OrbitalPair = tuple[int, int]

_CHECK_TOL = 1e-12


def ordered_pairs(num_qubits: int) -> tuple[OrbitalPair, ...]:
    """All (p, q) with p != q, row-major, 1-based."""
    return tuple(
        (p, q)
        for p in range(1, num_qubits + 1)
        for q in range(1, num_qubits + 1)
        if p != q
    )


@dataclass(frozen=True)
class TwoRDM:
    """
    D[(p,q)][(s,t)] = <a+_p a+_q a_t a_s> over ordered orbital pairs p != q.

    The trace over ordered pairs equals N(N-1) for an N-particle state.
    """

    num_qubits: int
    pairs: tuple[OrbitalPair, ...]
    matrix: ComplexArray = field(repr=False, compare=False)
    _index: dict[OrbitalPair, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_index", {pair: i for i, pair in enumerate(self.pairs)})

    def entry(self, row: OrbitalPair, col: OrbitalPair) -> complex:
        try:
            return complex(self.matrix[self._index[row], self._index[col]])
        except KeyError as e:
            raise ValidationError(f"No ordered orbital pair {e.args[0]} in the 2-RDM") from e

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def paired_subspace_block(self) -> ComplexArray:
        """Restriction to the pairs (2p-1, 2p) and (2p, 2p-1), in that order per p."""
        rows = []
        for p in range(1, self.num_qubits // 2 + 1):
            rows.append(self._index[(2 * p - 1, 2 * p)])
            rows.append(self._index[(2 * p, 2 * p - 1)])
        return self.matrix[np.ix_(rows, rows)]

    def write_csv(self, path: Path) -> Path:
        """Dump D as CSV, one labelled row per ordered pair, cells as re+imj."""
        labels = [f"{p}-{q}" for p, q in self.pairs]
        try:
            with path.open("w", encoding="utf-8", newline="") as handle:
                writer = csv.writer(handle, lineterminator="\n")
                writer.writerow(["", *labels])
                for label, row in zip(labels, self.matrix):
                    writer.writerow(
                        [label, *(f"{v.real:.12g}{v.imag:+.12g}j" for v in row)]
                    )
        except OSError as e:
            raise OutputError(f"Failed to write {path}: {e}") from e
        return path


def _annihilate_pair(amplitudes: ComplexArray, s: int, t: int) -> ComplexArray:
    """a_t a_s |psi>."""
    return FermionOp(((t, False), (s, False))).apply(amplitudes)


def brute_force_2rdm(state: StateVector) -> TwoRDM:
    """
    Two-body RDM as the Gram matrix of the vectors a_t a_s |psi>.

    Raises CapacityError above ORACLE_MAX_QUBITS and ValidationError if the
    result fails the Hermiticity or antisymmetry checks.
    """
    r = state.num_qubits
    if r > ORACLE_MAX_QUBITS:
        raise CapacityError(f"Brute-force 2-RDM supports r <= {ORACLE_MAX_QUBITS}, got {r}")
    pairs = ordered_pairs(r)
    if not pairs:
        return TwoRDM(r, pairs, np.zeros((0, 0), dtype=np.complex128))
    vectors = np.array([_annihilate_pair(state.amplitudes, s, t) for s, t in pairs])
    matrix = vectors.conj() @ vectors.T

    if not np.allclose(matrix, matrix.conj().T, atol=_CHECK_TOL, rtol=0):
        raise ValidationError("Brute-force 2-RDM is not Hermitian")
    index = {pair: i for i, pair in enumerate(pairs)}
    swap = [index[(q, p)] for p, q in pairs]
    if not np.allclose(matrix[swap], -matrix, atol=_CHECK_TOL, rtol=0):
        raise ValidationError("Brute-force 2-RDM is not antisymmetric under p <-> q")
    logger.debug(f"Brute-force 2-RDM on {r} qubits: {len(pairs)} ordered pairs")
    return TwoRDM(r, pairs, matrix)


def geminal_block_of(rdm: TwoRDM) -> GeminalMatrix:
    """K_pq = D[(2p-1, 2p)][(2q-1, 2q)]."""
    m = rdm.num_qubits // 2
    entries = np.zeros((m, m), dtype=np.complex128)
    for p in range(1, m + 1):
        for q in range(1, m + 1):
            entries[p - 1, q - 1] = rdm.entry((2 * p - 1, 2 * p), (2 * q - 1, 2 * q))
    return GeminalMatrix(entries)


def paired_subspace_lambda(rdm: TwoRDM) -> float:
    """Largest eigenvalue of D on the paired subspace, equal to 2 lambda_D."""
    block = rdm.paired_subspace_block()
    return largest_eigenvalue(block)[0]


def closed_form_lambda(sector: Sector, num_qubits: int) -> float:
    """
    lambda_D of the extreme AGP state on r = 2m qubits.

    Sector N = 2n: n(m - n + 1)/m. Ensemble: 1/2 + (m - 1)/4. Zero for m = 0
    and for the vacuum.
    """
    if num_qubits < 0 or num_qubits % 2:
        raise ValidationError(f"Closed form needs an even qubit count, got {num_qubits}")
    m = num_qubits // 2
    if sector == ENSEMBLE:
        return 0.0 if m == 0 else 0.5 + (m - 1) / 4
    n_particles = int(sector)
    if n_particles % 2 or not 0 <= n_particles <= num_qubits:
        raise ValidationError(
            f"Closed form needs an even particle number in [0, {num_qubits}], got {n_particles}"
        )
    n = n_particles // 2
    if n == 0:
        return 0.0
    return n * (m - n + 1) / m


def sector_weight(num_qubits: int, n_particles: int) -> float:
    """Probability of finding N = 2n particles in the extreme AGP state: C(m, n) / 2^m."""
    m = num_qubits // 2
    if n_particles % 2 or not 0 <= n_particles <= num_qubits:
        return 0.0
    return comb(m, n_particles // 2) / 2**m

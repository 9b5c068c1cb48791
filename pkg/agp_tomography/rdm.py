"""Geminal matrix assembly, eigen-analysis and condensation verdicts.

K is the m x m pair-pair block of the two-body reduced density matrix on the
paired subspace, K_pq = <a+_{2p} a+_{2p-1} a_{2q-1} a_{2q}>, with m = r/2 pairs.
Its largest eigenvalue lambda_D is the condensation measure: lambda_D > 1 marks
off-diagonal long-range order.
"""

import logging
from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Literal, Union

import numpy as np
import numpy.typing as npt

from agp_tomography.constants import HERMITIAN_TOL, VERIFY_TOL
from agp_tomography.exceptions import (
    IncompleteEntriesError,
    SectorUnavailableError,
    ValidationError,
)
from agp_tomography.pairing import (
    Component,
    diagonal_pair_occupation,
    pauli_expansion_pair_hopper,
    terms_to_sum,
)
from agp_tomography.statevector import StateVector, expectation
from agp_tomography.tomography import EntryEstimate, EntryKey

logger = logging.getLogger(__name__)

ComplexArray = npt.NDArray[np.complex128]

ENSEMBLE: Literal["ensemble"] = "ensemble"
Sector = Union[Literal["ensemble"], int]


def sector_label(sector: Sector) -> str:
    return ENSEMBLE if sector == ENSEMBLE else f"N{sector}"


@dataclass(frozen=True, eq=False)
class GeminalMatrix:
    """
    Hermitian m x m geminal matrix with optional per-entry standard errors.

    stderr is complex: its real part is the standard error of Re K_pq and its
    imaginary part that of Im K_pq. None for exact (simulated) matrices.
    """

    entries: ComplexArray = field(repr=False)
    stderr: ComplexArray | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        entries = np.asarray(self.entries, dtype=np.complex128)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ValidationError(f"Geminal matrix must be square, got shape {entries.shape}")
        object.__setattr__(self, "entries", entries)
        if self.stderr is not None:
            stderr = np.asarray(self.stderr, dtype=np.complex128)
            if stderr.shape != entries.shape:
                raise ValidationError(
                    f"stderr shape {stderr.shape} does not match entries {entries.shape}"
                )
            object.__setattr__(self, "stderr", stderr)

    @property
    def m(self) -> int:
        return int(self.entries.shape[0])

    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        return bool(np.allclose(self.entries, self.entries.conj().T, atol=tol, rtol=0))

    def check(self, tol: float = HERMITIAN_TOL) -> None:
        """Raise ValidationError unless K is Hermitian with diagonal in [0, 1]."""
        if not self.is_hermitian(tol):
            raise ValidationError("Geminal matrix is not Hermitian")
        diagonal = np.diag(self.entries)
        if np.any(np.abs(diagonal.imag) > tol):
            raise ValidationError("Geminal matrix diagonal is not real")
        if np.any(diagonal.real < -tol) or np.any(diagonal.real > 1 + tol):
            raise ValidationError("Geminal matrix diagonal outside [0, 1]")


def assemble_exact(state: StateVector) -> GeminalMatrix:
    """
    Exact K from a statevector through the Pauli expansions.

    K_pp = <n_{2p-1} n_{2p}>, Re K_pq = <REAL>/2, Im K_pq = <IMAGINARY>/2. A
    zero-qubit state gives the empty matrix.
    """
    r = state.num_qubits
    if r % 2:
        raise ValidationError(f"Geminal matrix needs an even qubit count, got {r}")
    m = r // 2
    entries = np.zeros((m, m), dtype=np.complex128)
    for p in range(1, m + 1):
        occupation = terms_to_sum(diagonal_pair_occupation(p, r), r)
        entries[p - 1, p - 1] = expectation(state, occupation).real
        for q in range(p + 1, m + 1):
            real = terms_to_sum(pauli_expansion_pair_hopper(p, q, Component.REAL, r), r)
            imag = terms_to_sum(pauli_expansion_pair_hopper(p, q, Component.IMAGINARY, r), r)
            value = complex(expectation(state, real).real, expectation(state, imag).real) / 2
            entries[p - 1, q - 1] = value
            entries[q - 1, p - 1] = value.conjugate()
    geminal = GeminalMatrix(entries)
    geminal.check()
    return geminal


def required_entries(m: int) -> list[EntryKey]:
    keys: list[EntryKey] = [(p, p, Component.DIAGONAL) for p in range(1, m + 1)]
    for p in range(1, m + 1):
        for q in range(p + 1, m + 1):
            keys.append((p, q, Component.REAL))
            keys.append((p, q, Component.IMAGINARY))
    return keys


def assemble_from_shots(m: int, estimates: Mapping[EntryKey, EntryEstimate]) -> GeminalMatrix:
    """
    Build K (Hermitian-symmetrized) and its stderr from per-entry estimates.

    Raises IncompleteEntriesError when entries are missing and
    SectorUnavailableError when any estimate is empty after post-selection.
    """
    keys = required_entries(m)
    missing = [key for key in keys if key not in estimates]
    if missing:
        listed = ", ".join(f"({p},{q},{c.value})" for p, q, c in missing[:5])
        raise IncompleteEntriesError(f"{len(missing)} missing entries, e.g. {listed}")
    empty = [key for key in keys if estimates[key].empty]
    if empty:
        raise SectorUnavailableError(
            f"{len(empty)} entries have no readouts left after post-selection"
        )

    entries = np.zeros((m, m), dtype=np.complex128)
    stderr = np.zeros((m, m), dtype=np.complex128)
    for p in range(1, m + 1):
        estimate = estimates[(p, p, Component.DIAGONAL)]
        entries[p - 1, p - 1] = estimate.value.real
        stderr[p - 1, p - 1] = estimate.stderr
        for q in range(p + 1, m + 1):
            real = estimates[(p, q, Component.REAL)]
            imag = estimates[(p, q, Component.IMAGINARY)]
            entries[p - 1, q - 1] = complex(real.value.real, imag.value.imag)
            entries[q - 1, p - 1] = complex(real.value.real, -imag.value.imag)
            stderr[p - 1, q - 1] = stderr[q - 1, p - 1] = complex(real.stderr, imag.stderr)
    entries = (entries + entries.conj().T) / 2
    geminal = GeminalMatrix(entries, stderr)
    geminal.check()
    return geminal


def embed_orbital_block(geminal: GeminalMatrix | ComplexArray) -> ComplexArray:
    """r x r orbital-pair matrix G_uv = K_{pair(u), pair(v)}, i.e. K kron [[1,1],[1,1]]."""
    entries = geminal.entries if isinstance(geminal, GeminalMatrix) else np.asarray(geminal)
    return np.kron(entries, np.ones((2, 2), dtype=np.complex128))


def largest_eigenvalue(matrix: npt.ArrayLike) -> tuple[float, ComplexArray]:
    """
    Largest eigenvalue and unit eigenvector of a Hermitian matrix.

    The eigenvector phase is fixed so that its first component of maximal
    magnitude is real and positive. An empty matrix gives (0.0, empty vector).
    """
    m = np.asarray(matrix, dtype=np.complex128)
    if m.size == 0:
        return 0.0, np.zeros(0, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"Expected a square matrix, got shape {m.shape}")
    if not np.allclose(m, m.conj().T, atol=HERMITIAN_TOL, rtol=0):
        raise ValidationError("Matrix is not Hermitian")
    values, vectors = np.linalg.eigh((m + m.conj().T) / 2)
    vector = vectors[:, -1]
    magnitudes = np.abs(vector)
    anchor = int(np.flatnonzero(magnitudes >= magnitudes.max() - 1e-12)[0])
    vector = vector * (magnitudes[anchor] / vector[anchor])
    return float(values[-1]), vector / np.linalg.norm(vector)


def lambda_stderr(geminal: GeminalMatrix, vector: ComplexArray) -> float | None:
    """
    First-order propagation of entry errors to lambda_D = v^H K v.

    A perturbation of Re K_pq and Im K_pq (mirrored to K_qp) moves lambda_D by
    2 (Re c dRe - Im c dIm) with c = conj(v_p) v_q; entries are taken as
    independent.
    """
    if geminal.stderr is None or vector.size == 0:
        return None
    weights = np.abs(vector) ** 2
    se = geminal.stderr
    variance = float(np.sum(weights**2 * np.diag(se).real ** 2))
    m = geminal.m
    for p in range(m):
        for q in range(p + 1, m):
            c = np.conj(vector[p]) * vector[q]
            variance += 4 * (c.real**2 * se[p, q].real ** 2 + c.imag**2 * se[p, q].imag ** 2)
    return float(np.sqrt(variance))


def yang_coleman_bound(n_particles: int, num_qubits: int) -> float:
    """Largest eigenvalue any N-fermion state can reach on r orbitals: N(1 - (N-2)/r)."""
    if n_particles % 2 or not 2 <= n_particles <= num_qubits:
        raise ValidationError(
            f"Bound needs an even particle number in [2, {num_qubits}], got {n_particles}"
        )
    return n_particles * (1 - (n_particles - 2) / num_qubits)


@dataclass(frozen=True, eq=False)
class CondensationReport:
    """
    One sweep row: lambda_D, its eigenvector, the N-fermion bound and the verdict.

    Unavailable rows (empty sectors) carry no lambda_D, eigvec, verdict or
    lambda_stderr. bound is None for the ensemble and for sectors below N = 2.
    """

    r: int
    sector: Sector
    lambda_D: float | None
    bound: float | None
    condensed: bool | None
    eigvec: ComplexArray | None = field(default=None, repr=False)
    lambda_stderr: float | None = None
    available: bool = True


def _bound_for(num_qubits: int, sector: Sector) -> float | None:
    if sector == ENSEMBLE:
        return None
    n = int(sector)
    if n % 2 == 0 and 2 <= n <= num_qubits:
        return yang_coleman_bound(n, num_qubits)
    return None


def condensation_verdict(num_qubits: int, sector: Sector, geminal: GeminalMatrix) -> CondensationReport:
    """Eigen-analysis of K into a report row; condensed iff lambda_D exceeds 1 beyond round-off."""
    value, vector = largest_eigenvalue(geminal.entries)
    report = CondensationReport(
        r=num_qubits,
        sector=sector,
        lambda_D=value,
        bound=_bound_for(num_qubits, sector),
        condensed=value > 1 + VERIFY_TOL,
        eigvec=vector,
        lambda_stderr=lambda_stderr(geminal, vector),
    )
    logger.debug(f"r={num_qubits} sector={sector_label(sector)} lambda_D={value:.6f}")
    return report


def unavailable_report(num_qubits: int, sector: Sector) -> CondensationReport:
    return CondensationReport(
        r=num_qubits,
        sector=sector,
        lambda_D=None,
        bound=_bound_for(num_qubits, sector),
        condensed=None,
        available=False,
    )

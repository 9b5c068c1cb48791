"""Measurement settings for geminal-matrix tomography and the per-entry estimator.

A setting is a basis rotation applied before a full computational-basis
readout. The DIAGONAL setting is the identity rotation; one readout serves every
pair occupation <n_{2p-1} n_{2p}>. Each off-diagonal entry K_pq uses two
joint-basis settings, one per component, acting on the four qubits of pairs p
and q. Their rotation maps the two eigenstates (|A> +- phase |B>)/sqrt(2) of
the pair-transfer operator to single basis outcomes, where A has pair p doubly
occupied and B has pair q doubly occupied. Every other outcome decodes to
eigenvalue 0 and a well-defined local particle number, so post-selection on a
total particle number stays possible with the same readout.
"""

import logging
from collections.abc import Mapping
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import numpy.typing as npt

from agp_tomography.exceptions import ValidationError
from agp_tomography.pairing import Component, PairIndex
from agp_tomography.statevector import (
    Circuit,
    Histogram,
    StateVector,
    apply_circuit,
    popcounts,
)

logger = logging.getLogger(__name__)

# (eigenvalue, local particle number) per local outcome index
DecodeTable = tuple[tuple[int, int], ...]
EntryKey = tuple[int, int, Component]

_LOCAL_QUBITS = 4
_STATE_A = 0b0011
_STATE_B = 0b1100
_AMPLITUDE_TOL = 1e-9

# local pair outcome (bit0 = orbital 2p-1, bit1 = orbital 2p)
DIAGONAL_DECODE: DecodeTable = ((0, 0), (0, 1), (0, 1), (1, 2))


def _ry_quarter(circuit: Circuit, qubit: int, inverse: bool = False) -> None:
    """Ry(+pi/4), or Ry(-pi/4) when inverse, as S^dag H T H S with T^dag for the inverse."""
    circuit.sdg(qubit).h(qubit)
    if inverse:
        circuit.tdg(qubit)
    else:
        circuit.t(qubit)
    circuit.h(qubit).s(qubit)


def _toffoli(circuit: Circuit, control_1: int, control_2: int, target: int) -> None:
    circuit.h(target)
    circuit.cx(control_2, target).tdg(target)
    circuit.cx(control_1, target).t(target)
    circuit.cx(control_2, target).tdg(target)
    circuit.cx(control_1, target).t(control_2).t(target).h(target)
    circuit.cx(control_1, control_2).t(control_1).tdg(control_2)
    circuit.cx(control_1, control_2)


def joint_rotation(component: Component) -> Circuit:
    """
    Four-qubit rotation for the (a, b, c, d) = (2p-1, 2p, 2q-1, 2q) block.

    The CNOT ladder sends |A> and |B> to basis states that differ only on a, with
    b = d = 1. For IMAGINARY an S on a turns the relative phase i into 1. A
    Hadamard on a, controlled on b and d, then separates the + and - combinations:
    Ry(pi/4), Toffoli(b, d -> a), Ry(-pi/4).
    """
    if component is Component.DIAGONAL:
        raise ValidationError("The diagonal setting has no joint rotation")
    circuit = Circuit(_LOCAL_QUBITS)
    circuit.cx(3, 2).cx(4, 3).cx(1, 4)
    if component is Component.IMAGINARY:
        circuit.s(1)
    _ry_quarter(circuit, 1)
    _toffoli(circuit, 2, 4, 1)
    _ry_quarter(circuit, 1, inverse=True)
    return circuit


def rotation_unitary(circuit: Circuit) -> npt.NDArray[np.complex128]:
    """Dense unitary of a small circuit, column b = circuit |b>."""
    return np.column_stack(
        [
            apply_circuit(StateVector.basis_state(circuit.num_qubits, b), circuit).amplitudes
            for b in range(1 << circuit.num_qubits)
        ]
    )


def _single_outcome(amplitudes: npt.NDArray[np.complex128], what: str) -> int:
    probs = np.abs(amplitudes) ** 2
    outcome = int(np.argmax(probs))
    if probs[outcome] < 1 - _AMPLITUDE_TOL:
        raise ValidationError(f"Rotation does not send {what} to a single outcome")
    return outcome


@lru_cache(maxsize=None)
def derive_decode(component: Component) -> DecodeTable:
    """
    Build the outcome decode table by simulating the joint rotation.

    Raises ValidationError if the rotation does not resolve both eigenstates to
    single outcomes, or if some outcome mixes inputs of different particle number.
    """
    unitary = rotation_unitary(joint_rotation(component))
    numbers = popcounts(_LOCAL_QUBITS)
    phase = 1j if component is Component.IMAGINARY else 1
    basis = np.eye(1 << _LOCAL_QUBITS, dtype=np.complex128)
    plus = (basis[_STATE_A] + phase * basis[_STATE_B]) / np.sqrt(2)
    minus = (basis[_STATE_A] - phase * basis[_STATE_B]) / np.sqrt(2)
    plus_outcome = _single_outcome(unitary @ plus, "the +1 eigenstate")
    minus_outcome = _single_outcome(unitary @ minus, "the -1 eigenstate")

    table = []
    for outcome in range(1 << _LOCAL_QUBITS):
        sources = {int(numbers[b]) for b in np.flatnonzero(np.abs(unitary[outcome]) > _AMPLITUDE_TOL)}
        if len(sources) != 1:
            raise ValidationError(
                f"Outcome {outcome:04b} mixes particle numbers {sorted(sources)}"
            )
        eigenvalue = 1 if outcome == plus_outcome else -1 if outcome == minus_outcome else 0
        table.append((eigenvalue, sources.pop()))
    return tuple(table)


@dataclass(frozen=True)
class MeasurementSetting:
    """
    One basis rotation plus the rule that turns its readouts into an estimate.

    For DIAGONAL, pair_pair is None and qubits is empty: the pair is chosen when
    estimating. Otherwise qubits lists the (2p-1, 2p, 2q-1, 2q) block in the
    bit order of the decode table.
    """

    num_qubits: int
    component: Component
    rotation: Circuit = field(compare=False, repr=False)
    decode: DecodeTable = field(repr=False)
    pair_pair: tuple[int, int] | None = None
    qubits: tuple[int, ...] = ()

    @property
    def is_diagonal(self) -> bool:
        return self.component is Component.DIAGONAL

    @property
    def label(self) -> str:
        if self.pair_pair is None:
            return "diagonal"
        p, q = self.pair_pair
        return f"pair{p}_{q}_{self.component.value}"


def diagonal_setting(num_qubits: int) -> MeasurementSetting:
    return MeasurementSetting(num_qubits, Component.DIAGONAL, Circuit(num_qubits), DIAGONAL_DECODE)


def pair_setting(p: int, q: int, component: Component, num_qubits: int) -> MeasurementSetting:
    """Joint-basis setting for K_pq (p < q) placed on a num_qubits register."""
    if not p < q:
        raise ValidationError(f"Off-diagonal settings need p < q, got ({p}, {q})")
    PairIndex(q).check(num_qubits)
    qubits = (2 * p - 1, 2 * p, 2 * q - 1, 2 * q)
    mapping = {local: qubit for local, qubit in enumerate(qubits, start=1)}
    rotation = joint_rotation(component).remapped(mapping, num_qubits)
    return MeasurementSetting(
        num_qubits, component, rotation, derive_decode(component), (p, q), qubits
    )


def plan_settings(num_qubits: int) -> list[MeasurementSetting]:
    """
    All settings needed to reconstruct K on a num_qubits register.

    Returns the DIAGONAL setting followed by REAL then IMAGINARY for every p < q,
    1 + m(m-1) settings for m = num_qubits/2 pairs.
    """
    if num_qubits < 2 or num_qubits % 2:
        raise ValidationError(f"Tomography needs an even qubit count >= 2, got {num_qubits}")
    m = num_qubits // 2
    settings = [diagonal_setting(num_qubits)]
    for p in range(1, m + 1):
        for q in range(p + 1, m + 1):
            settings.append(pair_setting(p, q, Component.REAL, num_qubits))
            settings.append(pair_setting(p, q, Component.IMAGINARY, num_qubits))
    logger.debug(f"Planned {len(settings)} settings for {num_qubits} qubits")
    return settings


@dataclass(frozen=True)
class EntryEstimate:
    """
    Estimate of one entry component.

    value is real for DIAGONAL and REAL settings and purely imaginary for
    IMAGINARY ones; stderr is the standard error of that component. retained is
    the number (or probability mass) of readouts kept after post-selection.
    """

    value: complex
    stderr: float
    retained: float
    empty: bool = False


def _local_outcomes(outcomes: npt.NDArray[np.int64], qubits: tuple[int, ...]) -> npt.NDArray[np.int64]:
    local = np.zeros_like(outcomes)
    for position, qubit in enumerate(qubits):
        local |= ((outcomes >> (qubit - 1)) & 1) << position
    return local


def estimate_entry(
    histogram: Histogram,
    setting: MeasurementSetting,
    n_filter: int | None = None,
    pair: int | None = None,
) -> EntryEstimate:
    """
    Turn a readout histogram into one entry estimate.

    With n_filter only readouts whose decoded total particle number equals
    n_filter are kept. The off-diagonal estimate is (n+ - n-) / (2 * retained);
    the diagonal estimate is the fraction of kept readouts with pair doubly
    occupied. An empty selection yields an estimate flagged empty.

    Parameters:
        histogram (Histogram): Basis index -> count (or probability).
        setting (MeasurementSetting): The setting the histogram was read under.
        n_filter (int | None): Total particle number to post-select on.
        pair (int | None): Pair to read out, required for the DIAGONAL setting.

    Returns:
        EntryEstimate: The estimate with its standard error.
    """
    outcomes = np.fromiter(histogram.keys(), dtype=np.int64, count=len(histogram))
    weights = np.fromiter(histogram.values(), dtype=np.float64, count=len(histogram))
    if np.any(weights < 0):
        raise ValidationError("Histogram weights must be non-negative")
    if np.any(outcomes >> setting.num_qubits):
        raise ValidationError(
            f"Histogram holds outcomes outside a {setting.num_qubits}-qubit register"
        )

    if setting.is_diagonal:
        if pair is None:
            raise ValidationError("The diagonal setting needs a pair to read out")
        PairIndex(pair).check(setting.num_qubits)
        qubits: tuple[int, ...] = (2 * pair - 1, 2 * pair)
    else:
        qubits = setting.qubits
    table = np.array(setting.decode, dtype=np.int64)
    local = _local_outcomes(outcomes, qubits)
    values = table[local, 0].astype(np.float64)

    if n_filter is not None:
        involved = sum(1 << (q - 1) for q in qubits)
        numbers = table[local, 1] + np.bitwise_count(outcomes & ~involved).astype(np.int64)
        keep = numbers == n_filter
        weights = weights[keep]
        values = values[keep]

    retained = float(weights.sum())
    if retained <= 0:
        return EntryEstimate(0j, 0.0, 0.0, empty=True)
    mean = float(np.dot(weights, values) / retained)
    second = float(np.dot(weights, values**2) / retained)
    stderr = float(np.sqrt(max(second - mean**2, 0.0) / retained))

    if setting.component is Component.DIAGONAL:
        return EntryEstimate(complex(mean, 0.0), stderr, retained)
    if setting.component is Component.REAL:
        return EntryEstimate(complex(mean / 2, 0.0), stderr / 2, retained)
    return EntryEstimate(complex(0.0, mean / 2), stderr / 2, retained)


def estimates_from_histograms(
    histograms: Mapping[MeasurementSetting, Histogram] | list[tuple[MeasurementSetting, Histogram]],
    n_filter: int | None = None,
) -> dict[EntryKey, EntryEstimate]:
    """Estimate every entry a set of setting histograms covers."""
    items = histograms.items() if isinstance(histograms, Mapping) else histograms
    estimates: dict[EntryKey, EntryEstimate] = {}
    for setting, histogram in items:
        if setting.is_diagonal:
            for p in range(1, setting.num_qubits // 2 + 1):
                estimates[(p, p, Component.DIAGONAL)] = estimate_entry(
                    histogram, setting, n_filter, pair=p
                )
        else:
            assert setting.pair_pair is not None
            p, q = setting.pair_pair
            estimates[(p, q, setting.component)] = estimate_entry(histogram, setting, n_filter)
    return estimates

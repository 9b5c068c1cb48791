"""Dense statevector simulation of r-qubit registers.

Conventions:
    - qubit indices are 1-based in the API, qubit k is bit k-1 of a basis index
      (little-endian);
    - bit value 1 marks an occupied orbital and Z|0> = +|0>;
    - gate matrices on two targets (t0, t1) are indexed by 2*bit(t0) + bit(t1),
      so CNOT(control, target) has the textbook matrix.
"""

import logging
import os
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple, Union

import numpy as np
import numpy.typing as npt

from agp_tomography.constants import (
    MAX_QUBITS,
    MAX_QUBITS_ENV,
    UNITARY_TOL,
    ZERO_WEIGHT_TOL,
)
from agp_tomography.exceptions import CapacityError, QubitIndexError, ValidationError
from agp_tomography.pauli import PauliString, PauliSum
from agp_tomography.resource_manager import ResourceManager

logger = logging.getLogger(__name__)

ComplexArray = npt.NDArray[np.complex128]
Histogram = dict[int, Union[int, float]]

_SQRT1_2 = 1 / np.sqrt(2)


class GateKind(str, Enum):
    """Supported gate kinds."""

    H = "H"
    X = "X"
    Y = "Y"
    Z = "Z"
    S = "S"
    SDG = "SDG"
    T = "T"
    TDG = "TDG"
    CNOT = "CNOT"
    UNITARY1 = "UNITARY1"
    UNITARY2 = "UNITARY2"


FIXED_MATRICES: dict[GateKind, ComplexArray] = {
    GateKind.H: np.array([[1, 1], [1, -1]], dtype=np.complex128) * _SQRT1_2,
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=np.complex128),
    GateKind.Y: np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    GateKind.Z: np.array([[1, 0], [0, -1]], dtype=np.complex128),
    GateKind.S: np.array([[1, 0], [0, 1j]], dtype=np.complex128),
    GateKind.SDG: np.array([[1, 0], [0, -1j]], dtype=np.complex128),
    GateKind.T: np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=np.complex128),
    GateKind.TDG: np.array(
        [[1, 0], [0, np.exp(-1j * np.pi / 4)]], dtype=np.complex128
    ),
    GateKind.CNOT: np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
        dtype=np.complex128,
    ),
}

TWO_QUBIT_KINDS = frozenset({GateKind.CNOT, GateKind.UNITARY2})
DENSE_KINDS = frozenset({GateKind.UNITARY1, GateKind.UNITARY2})


def max_qubits() -> int:
    """Capacity cap, overridable through the AGP_MAX_QUBITS environment variable."""
    raw = os.environ.get(MAX_QUBITS_ENV)
    if raw is None:
        return MAX_QUBITS
    try:
        return int(raw)
    except ValueError:
        logger.warning(
            f"Ignoring {MAX_QUBITS_ENV}={raw!r}: not an integer, using {MAX_QUBITS}"
        )
        return MAX_QUBITS


def _check_capacity(num_qubits: int) -> None:
    cap = max_qubits()
    if not 0 <= num_qubits <= cap:
        raise CapacityError(
            f"Register of {num_qubits} qubits outside supported range [0, {cap}]"
        )


@dataclass(frozen=True)
class Gate:
    """A unitary acting on one or two distinct qubits (1-based targets)."""

    kind: GateKind
    targets: tuple[int, ...]
    matrix: ComplexArray | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        arity = 2 if self.kind in TWO_QUBIT_KINDS else 1
        if len(self.targets) != arity:
            raise ValidationError(
                f"{self.kind.value} gate needs {arity} target(s), got {self.targets}"
            )
        if len(set(self.targets)) != len(self.targets):
            raise ValidationError(f"Gate targets must be distinct, got {self.targets}")
        if any(t < 1 for t in self.targets):
            raise QubitIndexError(f"Gate targets are 1-based, got {self.targets}")
        if self.kind in DENSE_KINDS:
            if self.matrix is None:
                raise ValidationError(f"{self.kind.value} gate requires a matrix")
            matrix = np.asarray(self.matrix, dtype=np.complex128)
            dim = 1 << arity
            if matrix.shape != (dim, dim):
                raise ValidationError(
                    f"{self.kind.value} matrix must be {dim}x{dim}, got {matrix.shape}"
                )
            if not np.allclose(
                matrix.conj().T @ matrix, np.eye(dim), atol=UNITARY_TOL, rtol=0
            ):
                raise ValidationError(f"{self.kind.value} matrix is not unitary")
            object.__setattr__(self, "matrix", matrix)
        elif self.matrix is not None:
            raise ValidationError(f"{self.kind.value} gate takes no explicit matrix")

    @property
    def unitary(self) -> ComplexArray:
        if self.matrix is not None:
            return self.matrix
        return FIXED_MATRICES[self.kind]

    def remapped(self, mapping: dict[int, int]) -> "Gate":
        return Gate(self.kind, tuple(mapping[t] for t in self.targets), self.matrix)


@dataclass
class Circuit:
    """Ordered list of gates on a fixed register."""

    num_qubits: int
    gates: list[Gate] = field(default_factory=list)

    def __post_init__(self) -> None:
        for gate in self.gates:
            self._check_gate(gate)

    def _check_gate(self, gate: Gate) -> None:
        if any(t > self.num_qubits for t in gate.targets):
            raise QubitIndexError(
                f"{gate.kind.value} on {gate.targets} outside register of "
                f"{self.num_qubits} qubits"
            )

    def append(self, gate: Gate) -> "Circuit":
        self._check_gate(gate)
        self.gates.append(gate)
        return self

    def add(self, kind: GateKind, *targets: int) -> "Circuit":
        return self.append(Gate(kind, tuple(targets)))

    def h(self, qubit: int) -> "Circuit":
        return self.add(GateKind.H, qubit)

    def x(self, qubit: int) -> "Circuit":
        return self.add(GateKind.X, qubit)

    def z(self, qubit: int) -> "Circuit":
        return self.add(GateKind.Z, qubit)

    def s(self, qubit: int) -> "Circuit":
        return self.add(GateKind.S, qubit)

    def sdg(self, qubit: int) -> "Circuit":
        return self.add(GateKind.SDG, qubit)

    def t(self, qubit: int) -> "Circuit":
        return self.add(GateKind.T, qubit)

    def tdg(self, qubit: int) -> "Circuit":
        return self.add(GateKind.TDG, qubit)

    def cx(self, control: int, target: int) -> "Circuit":
        return self.add(GateKind.CNOT, control, target)

    def unitary(self, matrix: npt.ArrayLike, *targets: int) -> "Circuit":
        kind = GateKind.UNITARY2 if len(targets) == 2 else GateKind.UNITARY1
        return self.append(Gate(kind, tuple(targets), np.asarray(matrix)))

    def remapped(self, mapping: dict[int, int], num_qubits: int) -> "Circuit":
        """Copy of this circuit with qubit k relabelled mapping[k] on a new register."""
        return Circuit(num_qubits, [g.remapped(mapping) for g in self.gates])

    def count(self, kind: GateKind) -> int:
        return sum(1 for g in self.gates if g.kind == kind)

    def __add__(self, other: "Circuit") -> "Circuit":
        if other.num_qubits != self.num_qubits:
            raise ValidationError(
                f"Cannot concatenate circuits on {self.num_qubits} and "
                f"{other.num_qubits} qubits"
            )
        return Circuit(self.num_qubits, [*self.gates, *other.gates])

    def __len__(self) -> int:
        return len(self.gates)


@dataclass(frozen=True)
class NoiseModel:
    """Depolarizing gate noise plus independent readout confusion."""

    p1: float = 0.0
    p2: float = 0.0
    readout_01: float = 0.0
    readout_10: float = 0.0

    def __post_init__(self) -> None:
        for name in ("p1", "p2", "readout_01", "readout_10"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValidationError(f"Noise probability {name}={value} not in [0, 1]")

    @classmethod
    def from_preset(cls, name: str) -> "NoiseModel":
        fields = ResourceManager.get_noise_preset(name)
        if fields is None:
            available = ", ".join(ResourceManager.list_noise_presets())
            raise ValidationError(
                f"Unknown noise preset '{name}' (available: {available})"
            )
        return cls(**fields)

    @property
    def has_gate_noise(self) -> bool:
        return self.p1 > 0 or self.p2 > 0

    @property
    def has_readout_noise(self) -> bool:
        return self.readout_01 > 0 or self.readout_10 > 0

    @property
    def is_ideal(self) -> bool:
        return not (self.has_gate_noise or self.has_readout_noise)


@dataclass(frozen=True)
class StateVector:
    """Dense amplitude array over num_qubits qubits."""

    num_qubits: int
    amplitudes: ComplexArray = field(compare=False, repr=False)

    def __post_init__(self) -> None:
        amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if amplitudes.shape != (1 << self.num_qubits,):
            raise ValidationError(
                f"Expected {1 << self.num_qubits} amplitudes for {self.num_qubits} "
                f"qubits, got shape {amplitudes.shape}"
            )
        object.__setattr__(self, "amplitudes", amplitudes)

    @classmethod
    def basis_state(cls, num_qubits: int, index: int) -> "StateVector":
        _check_capacity(num_qubits)
        amplitudes = np.zeros(1 << num_qubits, dtype=np.complex128)
        amplitudes[index] = 1
        return cls(num_qubits, amplitudes)

    @property
    def dim(self) -> int:
        return 1 << self.num_qubits

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> npt.NDArray[np.float64]:
        probs = np.abs(self.amplitudes) ** 2
        total = probs.sum()
        return probs / total if total > 0 else probs


class Projection(NamedTuple):
    """Result of particle-number projection; state is None when weight is zero."""

    state: StateVector | None
    weight: float


def popcounts(num_qubits: int) -> npt.NDArray[np.int64]:
    """Particle number of every basis index of a num_qubits register."""
    return np.bitwise_count(np.arange(1 << num_qubits, dtype=np.int64)).astype(
        np.int64
    )


def new_zero_state(num_qubits: int) -> StateVector:
    """Vacuum |0...0> on num_qubits qubits."""
    return StateVector.basis_state(num_qubits, 0)


def _apply_matrix(
    amplitudes: ComplexArray, num_qubits: int, matrix: ComplexArray, targets: tuple[int, ...]
) -> ComplexArray:
    k = len(targets)
    psi = amplitudes.reshape((2,) * num_qubits)
    axes = [num_qubits - t for t in targets]
    op = matrix.reshape((2,) * (2 * k))
    out = np.tensordot(op, psi, axes=(list(range(k, 2 * k)), axes))
    out = np.moveaxis(out, list(range(k)), axes)
    return np.ascontiguousarray(out).reshape(-1)


def _check_gate(state: StateVector, gate: Gate) -> None:
    if any(t > state.num_qubits for t in gate.targets):
        raise QubitIndexError(
            f"{gate.kind.value} on {gate.targets} outside register of "
            f"{state.num_qubits} qubits"
        )


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    """Return a new state with the gate's unitary applied to its targets."""
    _check_gate(state, gate)
    amplitudes = _apply_matrix(
        state.amplitudes, state.num_qubits, gate.unitary, gate.targets
    )
    return StateVector(state.num_qubits, amplitudes)


def apply_circuit(state: StateVector, circuit: Circuit) -> StateVector:
    if circuit.num_qubits > state.num_qubits:
        raise QubitIndexError(
            f"Circuit on {circuit.num_qubits} qubits does not fit a "
            f"{state.num_qubits}-qubit state"
        )
    for gate in circuit.gates:
        state = apply_gate(state, gate)
    return state


def agp_circuit(num_qubits: int) -> Circuit:
    """H(2j-1) then CNOT(2j-1 -> 2j) for every pair j: one Bell pair per Cooper pair."""
    if num_qubits < 0 or num_qubits % 2:
        raise ValidationError(f"AGP preparation needs an even qubit count, got {num_qubits}")
    _check_capacity(num_qubits)
    circuit = Circuit(num_qubits)
    for j in range(1, num_qubits // 2 + 1):
        circuit.h(2 * j - 1).cx(2 * j - 1, 2 * j)
    return circuit


def prepare_agp(num_qubits: int) -> StateVector:
    """Extreme AGP (BCS product) state: the tensor product of r/2 Bell pairs."""
    circuit = agp_circuit(num_qubits)
    state = apply_circuit(new_zero_state(num_qubits), circuit)
    logger.debug(f"Prepared AGP state on {num_qubits} qubits with {len(circuit)} gates")
    return state


def expectation(state: StateVector, op: PauliString | PauliSum) -> complex:
    """<state| op |state> for a Pauli string or a weighted Pauli sum."""
    if op.num_qubits > state.num_qubits:
        raise QubitIndexError(
            f"Operator on {op.num_qubits} qubits does not fit a "
            f"{state.num_qubits}-qubit state"
        )
    if isinstance(op, PauliString):
        terms = [(1 + 0j, PauliString(op.letters, state.num_qubits, op.phase))]
    else:
        terms = [
            (coeff, PauliString(string.letters, state.num_qubits))
            for coeff, string in op.terms()
        ]
    amplitudes = state.amplitudes
    value = 0j
    for coeff, string in terms:
        value += coeff * complex(np.vdot(amplitudes, string.apply(amplitudes)))
    return value


def project_particle_number(state: StateVector, particles: int) -> Projection:
    """Keep only basis states with popcount == particles and renormalize."""
    if not 0 <= particles <= state.num_qubits:
        raise ValidationError(
            f"Particle number {particles} outside [0, {state.num_qubits}]"
        )
    mask = popcounts(state.num_qubits) == particles
    projected = np.where(mask, state.amplitudes, 0)
    weight = float(np.sum(np.abs(projected) ** 2))
    if weight <= ZERO_WEIGHT_TOL:
        logger.debug(f"Sector N={particles} has zero weight")
        return Projection(None, weight)
    return Projection(
        StateVector(state.num_qubits, projected / np.sqrt(weight)), weight
    )


def exact_distribution(state: StateVector, rotation: Circuit) -> Histogram:
    """Outcome probabilities after the rotation: the shots -> infinity histogram."""
    probs = apply_circuit(state, rotation).probabilities()
    support = np.flatnonzero(probs > 1e-15)
    return {int(i): float(probs[i]) for i in support}


def _insert_pauli(amplitudes: ComplexArray, num_qubits: int, gate: Gate, index: int) -> ComplexArray:
    letters = []
    for target in reversed(gate.targets):
        index, letter = divmod(index, 4)
        letters.append((target, "IXYZ"[letter]))
    return PauliString(tuple(letters), num_qubits).apply(amplitudes)


def _sample_trajectories(
    state: StateVector,
    rotation: Circuit,
    shots: int,
    noise: NoiseModel,
    rng: np.random.Generator,
) -> npt.NDArray[np.int64]:
    """Per-shot Monte-Carlo Pauli insertion, simulated once per distinct error pattern."""
    gates = rotation.gates
    n = state.num_qubits
    rates = np.array([noise.p2 if len(g.targets) == 2 else noise.p1 for g in gates])
    hits = rng.random((shots, len(gates))) < rates
    draws = rng.random((shots, len(gates)))

    patterns: dict[tuple[tuple[int, int], ...], int] = {}
    noisy_rows = np.flatnonzero(hits.any(axis=1))
    for row in noisy_rows:
        key = tuple(
            (int(col), 1 + int(draws[row, col] * (4 ** len(gates[col].targets) - 1)))
            for col in np.flatnonzero(hits[row])
        )
        patterns[key] = patterns.get(key, 0) + 1

    # ideal trajectory, kept gate by gate so noisy ones resume from their first error
    prefix = [state.amplitudes]
    for gate in gates:
        prefix.append(_apply_matrix(prefix[-1], n, gate.unitary, gate.targets))

    counts = rng.multinomial(
        shots - len(noisy_rows), StateVector(n, prefix[-1]).probabilities()
    )
    for key, count in patterns.items():
        errors = dict(key)
        first = key[0][0]
        amplitudes = _insert_pauli(prefix[first + 1], n, gates[first], errors[first])
        for index in range(first + 1, len(gates)):
            gate = gates[index]
            amplitudes = _apply_matrix(amplitudes, n, gate.unitary, gate.targets)
            if index in errors:
                amplitudes = _insert_pauli(amplitudes, n, gate, errors[index])
        counts += rng.multinomial(count, StateVector(n, amplitudes).probabilities())
    logger.debug(
        f"Sampled {shots} shots over {len(patterns) + 1} trajectories"
    )
    return counts


def _apply_readout_noise(
    outcomes: npt.NDArray[np.int64],
    num_qubits: int,
    noise: NoiseModel,
    rng: np.random.Generator,
) -> npt.NDArray[np.int64]:
    flipped = outcomes.copy()
    for bit in range(num_qubits):
        ones = (outcomes >> bit) & 1
        rate = np.where(ones == 1, noise.readout_10, noise.readout_01)
        flips = rng.random(outcomes.shape[0]) < rate
        flipped ^= flips.astype(np.int64) << bit
    return flipped


def sample_shots(
    state: StateVector,
    rotation: Circuit,
    shots: int,
    noise: NoiseModel | None = None,
    seed: int = 0,
) -> Histogram:
    """
    Sample computational-basis outcomes after applying the rotation.

    With a noise model every gate is followed, with probability p1 (one-qubit
    gates) or p2 (two-qubit gates), by a uniformly random non-identity Pauli on
    its targets, drawn independently per shot; each readout bit is then flipped
    with readout_01 / readout_10. The result is deterministic for a fixed seed.

    Parameters:
        state (StateVector): The state to measure.
        rotation (Circuit): Basis rotation applied before measurement.
        shots (int): Number of samples, at least 1.
        noise (NoiseModel | None): Optional noise model.
        seed (int): Seed for numpy's default generator.

    Returns:
        Histogram: Basis index -> count, sorted by index, zero counts omitted.
    """
    if shots < 1:
        raise ValidationError(f"shots must be >= 1, got {shots}")
    if rotation.num_qubits > state.num_qubits:
        raise QubitIndexError(
            f"Rotation on {rotation.num_qubits} qubits does not fit a "
            f"{state.num_qubits}-qubit state"
        )
    rng = np.random.default_rng(seed)
    if noise is not None and noise.has_gate_noise and rotation.gates:
        counts = _sample_trajectories(state, rotation, shots, noise, rng)
    else:
        probs = apply_circuit(state, rotation).probabilities()
        counts = rng.multinomial(shots, probs)

    outcomes = np.repeat(np.arange(state.dim, dtype=np.int64), counts)
    if noise is not None and noise.has_readout_noise:
        outcomes = _apply_readout_noise(outcomes, state.num_qubits, noise, rng)
    values, frequencies = np.unique(outcomes, return_counts=True)
    return {int(v): int(c) for v, c in zip(values, frequencies)}

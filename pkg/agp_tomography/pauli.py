"""Pauli strings and weighted Pauli sums over little-endian qubit registers.

Qubit indices are 1-based in the API; qubit k corresponds to bit k-1 of a basis
index. Y is taken as i*X*Z so that a string acts on a basis state as

    P|b> = phase * i**nY * (-1)**popcount(b & zmask) |b ^ xmask>
"""

from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from typing import Union

import numpy as np
import numpy.typing as npt

from agp_tomography.exceptions import QubitIndexError, ValidationError

PHASES = (1 + 0j, -1 + 0j, 1j, -1j)
LETTERS = ("X", "Y", "Z")

# (a, b) -> (phase, letter) for the single-qubit product a*b
_PRODUCT: dict[tuple[str, str], tuple[complex, str]] = {
    ("X", "X"): (1, ""),
    ("Y", "Y"): (1, ""),
    ("Z", "Z"): (1, ""),
    ("X", "Y"): (1j, "Z"),
    ("Y", "Z"): (1j, "X"),
    ("Z", "X"): (1j, "Y"),
    ("Y", "X"): (-1j, "Z"),
    ("Z", "Y"): (-1j, "X"),
    ("X", "Z"): (-1j, "Y"),
}

LetterKey = tuple[tuple[int, str], ...]


def _normalize_letters(letters: Mapping[int, str] | Iterable[tuple[int, str]], num_qubits: int) -> LetterKey:
    items = letters.items() if isinstance(letters, Mapping) else letters
    normalized: dict[int, str] = {}
    for qubit, letter in items:
        letter = letter.upper()
        if letter == "I":
            continue
        if letter not in LETTERS:
            raise ValidationError(f"Unknown Pauli letter '{letter}'")
        if not 1 <= qubit <= num_qubits:
            raise QubitIndexError(
                f"Pauli letter on qubit {qubit} outside register of {num_qubits} qubits"
            )
        if qubit in normalized:
            raise ValidationError(f"Qubit {qubit} appears twice in Pauli string")
        normalized[qubit] = letter
    return tuple(sorted(normalized.items()))


def parity(values: npt.NDArray[np.int64]) -> npt.NDArray[np.int64]:
    return np.bitwise_count(values).astype(np.int64) & 1


@dataclass(frozen=True)
class PauliString:
    """Signed tensor product of single-qubit Pauli letters (identity elsewhere)."""

    letters: LetterKey
    num_qubits: int
    phase: complex = 1 + 0j

    def __post_init__(self) -> None:
        if self.num_qubits < 0:
            raise ValidationError("num_qubits must be non-negative")
        snapped = [p for p in PHASES if abs(complex(self.phase) - p) < 1e-12]
        if not snapped:
            raise ValidationError(f"Pauli phase must be one of ±1, ±i, got {self.phase}")
        object.__setattr__(self, "phase", snapped[0])
        object.__setattr__(
            self, "letters", _normalize_letters(self.letters, self.num_qubits)
        )

    @classmethod
    def parse(cls, label: str, num_qubits: int) -> "PauliString":
        """Parse labels like ``"X1 X2 Y3"``, ``"-Z1"`` or ``"-i X2"``."""
        text = label.strip()
        phase: complex = 1
        for prefix, value in (("-i", -1j), ("+i", 1j), ("i", 1j), ("-", -1), ("+", 1)):
            if text.startswith(prefix):
                phase = value
                text = text[len(prefix) :].strip()
                break
        letters = []
        for token in text.split():
            if token.upper() == "I":
                continue
            letters.append((int(token[1:]), token[0]))
        return cls(tuple(letters), num_qubits, phase)

    @property
    def letter_map(self) -> dict[int, str]:
        return dict(self.letters)

    @property
    def weight(self) -> int:
        return len(self.letters)

    @property
    def is_hermitian(self) -> bool:
        return abs(self.phase.imag) < 1e-12

    def count(self, letter: str) -> int:
        return sum(1 for _, value in self.letters if value == letter)

    def masks(self) -> tuple[int, int]:
        """Return (xmask, zmask) over 0-based bit positions."""
        xmask = 0
        zmask = 0
        for qubit, letter in self.letters:
            bit = 1 << (qubit - 1)
            if letter in ("X", "Y"):
                xmask |= bit
            if letter in ("Z", "Y"):
                zmask |= bit
        return xmask, zmask

    def _action(self) -> tuple[int, complex, npt.NDArray[np.complex128]]:
        xmask, zmask = self.masks()
        coeff = self.phase * (1j ** self.count("Y"))
        idx = np.arange(1 << self.num_qubits, dtype=np.int64)
        signs = 1 - 2 * parity(idx & zmask)
        return xmask, coeff, signs.astype(np.complex128)

    def apply(self, amplitudes: npt.NDArray[np.complex128]) -> npt.NDArray[np.complex128]:
        """Return P|psi> for a dense amplitude vector of matching size."""
        if amplitudes.shape != (1 << self.num_qubits,):
            raise ValidationError(
                f"Amplitude vector of shape {amplitudes.shape} does not match "
                f"{self.num_qubits} qubits"
            )
        xmask, coeff, signs = self._action()
        idx = np.arange(amplitudes.shape[0], dtype=np.int64)
        out = np.zeros_like(amplitudes)
        out[idx ^ xmask] = coeff * signs * amplitudes
        return out

    def to_matrix(self) -> npt.NDArray[np.complex128]:
        xmask, coeff, signs = self._action()
        dim = 1 << self.num_qubits
        idx = np.arange(dim, dtype=np.int64)
        matrix = np.zeros((dim, dim), dtype=np.complex128)
        matrix[idx ^ xmask, idx] = coeff * signs
        return matrix

    def with_phase(self, phase: complex) -> "PauliString":
        return PauliString(self.letters, self.num_qubits, phase)

    def __mul__(self, other: "PauliString") -> "PauliString":
        if not isinstance(other, PauliString):
            return NotImplemented
        if other.num_qubits != self.num_qubits:
            raise ValidationError(
                f"Cannot multiply Pauli strings on {self.num_qubits} and "
                f"{other.num_qubits} qubits"
            )
        phase = self.phase * other.phase
        merged = dict(self.letters)
        for qubit, letter in other.letters:
            if qubit not in merged:
                merged[qubit] = letter
                continue
            factor, product = _PRODUCT[(merged[qubit], letter)]
            phase *= factor
            if product:
                merged[qubit] = product
            else:
                del merged[qubit]
        return PauliString(tuple(merged.items()), self.num_qubits, phase)

    def __str__(self) -> str:
        sign = {1: "+", -1: "-", 1j: "+i", -1j: "-i"}[self.phase]  # type: ignore[index]
        body = " ".join(f"{letter}{qubit}" for qubit, letter in self.letters) or "I"
        return f"{sign}{body}"


@dataclass
class PauliSum:
    """Weighted sum of unsigned Pauli strings; phases live in the coefficients."""

    num_qubits: int
    coefficients: dict[LetterKey, complex] = field(default_factory=dict)

    @classmethod
    def identity(cls, num_qubits: int, coeff: complex = 1) -> "PauliSum":
        return cls(num_qubits, {(): complex(coeff)})

    @classmethod
    def from_string(cls, string: PauliString, coeff: complex = 1) -> "PauliSum":
        return cls(string.num_qubits, {string.letters: complex(coeff) * string.phase})

    @classmethod
    def single(cls, qubit: int, letter: str, num_qubits: int, coeff: complex = 1) -> "PauliSum":
        return cls.from_string(PauliString(((qubit, letter),), num_qubits), coeff)

    def _coerce(self, other: "PauliSumLike") -> "PauliSum":
        if isinstance(other, PauliSum):
            result = other
        elif isinstance(other, PauliString):
            result = PauliSum.from_string(other)
        else:
            result = PauliSum.identity(self.num_qubits, complex(other))
        if result.num_qubits != self.num_qubits:
            raise ValidationError(
                f"Cannot combine Pauli sums on {self.num_qubits} and "
                f"{result.num_qubits} qubits"
            )
        return result

    def __add__(self, other: "PauliSumLike") -> "PauliSum":
        other_sum = self._coerce(other)
        merged = dict(self.coefficients)
        for key, coeff in other_sum.coefficients.items():
            merged[key] = merged.get(key, 0) + coeff
        return PauliSum(self.num_qubits, merged).simplify()

    __radd__ = __add__

    def __neg__(self) -> "PauliSum":
        return PauliSum(self.num_qubits, {k: -c for k, c in self.coefficients.items()})

    def __sub__(self, other: "PauliSumLike") -> "PauliSum":
        return self + (-self._coerce(other))

    def __mul__(self, other: "PauliSumLike") -> "PauliSum":
        if isinstance(other, (int, float, complex)):
            return PauliSum(
                self.num_qubits,
                {k: c * other for k, c in self.coefficients.items()},
            ).simplify()
        other_sum = self._coerce(other)
        product: dict[LetterKey, complex] = {}
        for left_key, left_coeff in self.coefficients.items():
            left = PauliString(left_key, self.num_qubits)
            for right_key, right_coeff in other_sum.coefficients.items():
                string = left * PauliString(right_key, self.num_qubits)
                coeff = left_coeff * right_coeff * string.phase
                product[string.letters] = product.get(string.letters, 0) + coeff
        return PauliSum(self.num_qubits, product).simplify()

    def __rmul__(self, other: complex) -> "PauliSum":
        return self * other

    def adjoint(self) -> "PauliSum":
        return PauliSum(
            self.num_qubits,
            {k: complex(c).conjugate() for k, c in self.coefficients.items()},
        )

    def simplify(self, tol: float = 1e-14) -> "PauliSum":
        return PauliSum(
            self.num_qubits,
            {k: complex(c) for k, c in self.coefficients.items() if abs(c) > tol},
        )

    def terms(self) -> list[tuple[complex, PauliString]]:
        """Terms in deterministic order (by weight, then qubit/letter labels)."""
        keys = sorted(self.coefficients, key=lambda k: (len(k), k))
        return [
            (self.coefficients[k], PauliString(k, self.num_qubits)) for k in keys
        ]

    def to_matrix(self) -> npt.NDArray[np.complex128]:
        dim = 1 << self.num_qubits
        matrix = np.zeros((dim, dim), dtype=np.complex128)
        for coeff, string in self.terms():
            matrix += coeff * string.to_matrix()
        return matrix

    def __len__(self) -> int:
        return len(self.coefficients)


PauliSumLike = Union[PauliSum, PauliString, int, float, complex]

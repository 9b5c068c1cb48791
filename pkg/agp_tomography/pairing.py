"""Jordan-Wigner pair operators and their Pauli expansions.

Orbitals 2p-1 and 2p form pair p. The raising operator sigma+ maps |0> to |1>
(empty to occupied), so with Z|0> = +|0>:

    sigma+_k = (X_k - i Y_k) / 2,  n_k = (1 - Z_k) / 2,
    a+_j = Z_1 ... Z_{j-1} sigma+_j.

For adjacent orbitals the string of a+_{2p} a+_{2p-1} collapses to the single
factor Z_{2p-1}, which contributes a global sign of -1.
"""

import logging
from collections.abc import Iterable
from dataclasses import dataclass
from enum import Enum

import numpy as np
import numpy.typing as npt

from agp_tomography.exceptions import QubitIndexError, ValidationError
from agp_tomography.pauli import PauliString, PauliSum, parity

logger = logging.getLogger(__name__)

ComplexArray = npt.NDArray[np.complex128]
PauliTerms = list[tuple[float, PauliString]]


class Component(str, Enum):
    """Which part of a geminal matrix entry a measurement targets."""

    DIAGONAL = "diag"
    REAL = "re"
    IMAGINARY = "im"


@dataclass(frozen=True, order=True)
class PairIndex:
    """Cooper pair p, made of the adjacent orbitals (2p-1, 2p)."""

    p: int

    def __post_init__(self) -> None:
        if self.p < 1:
            raise QubitIndexError(f"Pair index must be >= 1, got {self.p}")

    @property
    def orbitals(self) -> tuple[int, int]:
        return 2 * self.p - 1, 2 * self.p

    def check(self, num_qubits: int) -> None:
        if 2 * self.p > num_qubits:
            raise QubitIndexError(
                f"Pair {self.p} needs orbitals {self.orbitals}, register has "
                f"{num_qubits} qubits"
            )


def _pair(p: PairIndex | int) -> PairIndex:
    return p if isinstance(p, PairIndex) else PairIndex(p)


def sigma_plus(qubit: int, num_qubits: int) -> PauliSum:
    return PauliSum.single(qubit, "X", num_qubits, 0.5) + PauliSum.single(
        qubit, "Y", num_qubits, -0.5j
    )


def sigma_minus(qubit: int, num_qubits: int) -> PauliSum:
    return sigma_plus(qubit, num_qubits).adjoint()


def number_operator(qubit: int, num_qubits: int) -> PauliSum:
    return PauliSum.identity(num_qubits, 0.5) + PauliSum.single(
        qubit, "Z", num_qubits, -0.5
    )


def jw_creation(orbital: int, num_qubits: int, with_strings: bool = True) -> PauliSum:
    """Qubit image of a+_orbital, optionally without the parity string."""
    operator = sigma_plus(orbital, num_qubits)
    if with_strings and orbital > 1:
        string = PauliString(tuple((k, "Z") for k in range(1, orbital)), num_qubits)
        operator = PauliSum.from_string(string) * operator
    return operator


def jw_annihilation(orbital: int, num_qubits: int, with_strings: bool = True) -> PauliSum:
    return jw_creation(orbital, num_qubits, with_strings).adjoint()


def pair_creation(p: PairIndex | int, num_qubits: int) -> PauliSum:
    """P+_p = sigma+_{2p} sigma+_{2p-1}."""
    pair = _pair(p)
    pair.check(num_qubits)
    low, high = pair.orbitals
    return sigma_plus(high, num_qubits) * sigma_plus(low, num_qubits)


def pair_annihilation(p: PairIndex | int, num_qubits: int) -> PauliSum:
    return pair_creation(p, num_qubits).adjoint()


def jw_pair_creation(
    p: PairIndex | int, with_strings: bool, num_qubits: int | None = None
) -> PauliSum:
    """
    Pauli expansion of the fermionic pair creation a+_{2p} a+_{2p-1}.

    With with_strings the full Jordan-Wigner images are multiplied out; without
    them the result is sigma+_{2p} sigma+_{2p-1}. Both are 4-term expansions on
    qubits (2p-1, 2p) and differ by the global sign -1.
    """
    pair = _pair(p)
    r = num_qubits if num_qubits is not None else 2 * pair.p
    pair.check(r)
    low, high = pair.orbitals
    if not with_strings:
        return pair_creation(pair, r)
    return jw_creation(high, r, True) * jw_creation(low, r, True)


def _real_terms(operator: PauliSum, what: str) -> PauliTerms:
    terms: PauliTerms = []
    for coeff, string in operator.terms():
        if abs(coeff.imag) > 1e-12:
            raise ValidationError(f"{what} has a non-real coefficient {coeff} on {string}")
        terms.append((float(coeff.real), string))
    return terms


def pair_hopper(
    p: PairIndex | int,
    q: PairIndex | int,
    component: Component,
    num_qubits: int,
) -> PauliSum:
    """P+_p P_q + P+_q P_p (REAL) or i(P+_q P_p - P+_p P_q) (IMAGINARY)."""
    forward = pair_creation(p, num_qubits) * pair_annihilation(q, num_qubits)
    backward = pair_creation(q, num_qubits) * pair_annihilation(p, num_qubits)
    if component is Component.REAL:
        return forward + backward
    if component is Component.IMAGINARY:
        return (backward - forward) * 1j
    raise ValidationError(f"Pair hopper needs REAL or IMAGINARY, got {component}")


def pauli_expansion_pair_hopper(
    p: PairIndex | int,
    q: PairIndex | int,
    component: Component,
    num_qubits: int | None = None,
) -> PauliTerms:
    """
    Expand the Hermitian pair-transfer operator between pairs p and q.

    The REAL component gives 8 X/Y strings with an even number of Y, the
    IMAGINARY component 8 strings with an odd number of Y; every coefficient is
    +-1/8. Expectations satisfy <REAL> = 2 Re K_pq and <IMAGINARY> = 2 Im K_pq.

    Parameters:
        p (PairIndex | int): First pair.
        q (PairIndex | int): Second pair, different from p.
        component (Component): REAL or IMAGINARY.
        num_qubits (int | None): Register size, defaults to 2*max(p, q).

    Returns:
        PauliTerms: (real coefficient, PauliString) in deterministic order.
    """
    pair_p, pair_q = _pair(p), _pair(q)
    if pair_p == pair_q:
        raise ValidationError(
            f"Pair hopper needs distinct pairs, got p = q = {pair_p.p}; "
            "use diagonal_pair_occupation"
        )
    r = num_qubits if num_qubits is not None else 2 * max(pair_p.p, pair_q.p)
    operator = pair_hopper(pair_p, pair_q, component, r)
    return _real_terms(operator, f"{component.value} hopper ({pair_p.p},{pair_q.p})")


def diagonal_pair_occupation(
    p: PairIndex | int, num_qubits: int | None = None
) -> PauliTerms:
    """n_{2p-1} n_{2p} = (1 - Z_{2p-1})(1 - Z_{2p}) / 4 as 4 terms of weight +-1/4."""
    pair = _pair(p)
    r = num_qubits if num_qubits is not None else 2 * pair.p
    pair.check(r)
    low, high = pair.orbitals
    operator = number_operator(low, r) * number_operator(high, r)
    return _real_terms(operator, f"pair {pair.p} occupation")


def terms_to_sum(terms: Iterable[tuple[complex, PauliString]], num_qubits: int) -> PauliSum:
    total = PauliSum(num_qubits)
    for coeff, string in terms:
        total = total + PauliSum.from_string(
            PauliString(string.letters, num_qubits, string.phase), coeff
        )
    return total


def _apply_ladder(
    amplitudes: ComplexArray, orbital: int, creation: bool, with_strings: bool
) -> ComplexArray:
    bit = 1 << (orbital - 1)
    idx = np.arange(amplitudes.shape[0], dtype=np.int64)
    occupied = (idx & bit) != 0
    source = ~occupied if creation else occupied
    values = amplitudes
    if with_strings:
        values = amplitudes * (1 - 2 * parity(idx & (bit - 1)))
    out = np.zeros_like(amplitudes)
    out[idx[source] ^ bit] = values[source]
    return out


@dataclass(frozen=True)
class FermionOp:
    """
    Product of ladder operators, leftmost first: ((2, True), (1, True)) is a+_2 a+_1.

    with_strings=True gives fermionic operators (Jordan-Wigner parity signs);
    with_strings=False gives the bare qubit operators sigma+/sigma-, which
    commute on different sites.
    """

    ladder: tuple[tuple[int, bool], ...]
    with_strings: bool = True

    def __post_init__(self) -> None:
        for orbital, _ in self.ladder:
            if orbital < 1:
                raise QubitIndexError(f"Orbital indices are 1-based, got {orbital}")

    @classmethod
    def parse(cls, label: str, with_strings: bool = True) -> "FermionOp":
        """Parse ``"2^ 1^ 3 4"``: a trailing caret marks a creation operator."""
        ladder = []
        for token in label.split():
            creation = token.endswith("^")
            ladder.append((int(token.rstrip("^")), creation))
        return cls(tuple(ladder), with_strings)

    def adjoint(self) -> "FermionOp":
        return FermionOp(
            tuple((orbital, not creation) for orbital, creation in reversed(self.ladder)),
            self.with_strings,
        )

    def normal_ordered(self) -> tuple[int, "FermionOp"]:
        """
        Reorder to creators (descending orbital) then annihilators (ascending).

        Returns (sign, op); sign is 0 when the product vanishes identically.
        Raises ValidationError when reordering needs a contraction a_j a+_j.
        """

        def key(item: tuple[int, bool]) -> tuple[int, int]:
            orbital, creation = item
            return (0, -orbital) if creation else (1, orbital)

        ladder = list(self.ladder)
        sign = 1
        for end in range(len(ladder) - 1, 0, -1):
            for i in range(end):
                left, right = ladder[i], ladder[i + 1]
                if left == right:
                    return 0, FermionOp((), self.with_strings)
                if key(left) <= key(right):
                    continue
                if left[0] == right[0]:
                    raise ValidationError(
                        f"Reordering {self} needs a contraction on orbital {left[0]}"
                    )
                ladder[i], ladder[i + 1] = right, left
                if self.with_strings:
                    sign = -sign
        if any(a == b for a, b in zip(ladder, ladder[1:])):
            return 0, FermionOp((), self.with_strings)
        return sign, FermionOp(tuple(ladder), self.with_strings)

    def apply(self, amplitudes: ComplexArray) -> ComplexArray:
        """Act on a dense amplitude vector (rightmost operator first)."""
        num_qubits = int(amplitudes.shape[0]).bit_length() - 1
        out = np.asarray(amplitudes, dtype=np.complex128)
        for orbital, creation in reversed(self.ladder):
            if orbital > num_qubits:
                raise QubitIndexError(
                    f"Orbital {orbital} outside register of {num_qubits} qubits"
                )
            out = _apply_ladder(out, orbital, creation, self.with_strings)
        return out

    def to_matrix(self, num_qubits: int) -> ComplexArray:
        dim = 1 << num_qubits
        identity = np.eye(dim, dtype=np.complex128)
        return np.column_stack([self.apply(identity[:, b]) for b in range(dim)])

    def to_pauli(self, num_qubits: int) -> PauliSum:
        operator = PauliSum.identity(num_qubits)
        for orbital, creation in self.ladder:
            if creation:
                factor = jw_creation(orbital, num_qubits, self.with_strings)
            else:
                factor = jw_annihilation(orbital, num_qubits, self.with_strings)
            operator = operator * factor
        return operator

    def __str__(self) -> str:
        return " ".join(
            f"{orbital}^" if creation else str(orbital) for orbital, creation in self.ladder
        )

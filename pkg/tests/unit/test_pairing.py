import numpy as np
import pytest

from agp_tomography.exceptions import QubitIndexError, ValidationError
from agp_tomography.pairing import (
    Component,
    FermionOp,
    PairIndex,
    diagonal_pair_occupation,
    jw_annihilation,
    jw_creation,
    jw_pair_creation,
    pauli_expansion_pair_hopper,
    sigma_minus,
    sigma_plus,
    terms_to_sum,
)
from agp_tomography.statevector import StateVector, expectation, prepare_agp

pytestmark = pytest.mark.unit


class TestPairIndex:
    def test_orbitals(self):
        assert PairIndex(3).orbitals == (5, 6)

    def test_invalid_index(self):
        with pytest.raises(QubitIndexError):
            PairIndex(0)

    def test_register_check(self):
        with pytest.raises(QubitIndexError):
            PairIndex(3).check(4)


class TestLadderOperators:
    def test_sigma_plus_raises_empty_to_occupied(self):
        matrix = sigma_plus(1, 1).to_matrix()
        np.testing.assert_allclose(matrix, [[0, 0], [1, 0]], atol=1e-15)

    def test_sigma_minus_is_adjoint(self):
        np.testing.assert_allclose(
            sigma_minus(2, 2).to_matrix(), sigma_plus(2, 2).to_matrix().conj().T, atol=1e-15
        )

    def test_anticommutation(self):
        r = 3
        for i in range(1, r + 1):
            for j in range(1, r + 1):
                a_i = jw_annihilation(i, r).to_matrix()
                adag_j = jw_creation(j, r).to_matrix()
                anticommutator = a_i @ adag_j + adag_j @ a_i
                expected = np.eye(1 << r) if i == j else np.zeros((1 << r, 1 << r))
                np.testing.assert_allclose(anticommutator, expected, atol=1e-14)

    def test_pauli_image_matches_bit_action(self):
        op = FermionOp.parse("4^ 1^ 2")
        np.testing.assert_allclose(
            op.to_pauli(4).to_matrix(), op.to_matrix(4), atol=1e-14
        )

    def test_bare_operators_ignore_parity(self):
        op = FermionOp(((3, True),), with_strings=False)
        state = StateVector.basis_state(3, 0b011)
        assert op.apply(state.amplitudes)[0b111] == pytest.approx(1)


class TestJwPairCreation:
    @pytest.mark.parametrize("p", [1, 2, 3])
    def test_four_terms_on_the_pair(self, p):
        operator = jw_pair_creation(p, True, 6)
        assert len(operator) == 4
        for _, string in operator.terms():
            assert set(string.letter_map) <= {2 * p - 1, 2 * p}

    @pytest.mark.parametrize("p", [1, 2, 3])
    def test_strings_give_a_global_sign(self, p):
        with_strings = jw_pair_creation(p, True, 6).to_matrix()
        bare = jw_pair_creation(p, False, 6).to_matrix()
        np.testing.assert_allclose(with_strings, -bare, atol=1e-14)

    def test_default_register(self):
        assert jw_pair_creation(2, False).num_qubits == 4


class TestPairHopper:
    @pytest.mark.parametrize("component,odd", [(Component.REAL, 0), (Component.IMAGINARY, 1)])
    def test_structure(self, component, odd):
        terms = pauli_expansion_pair_hopper(1, 2, component)
        assert len(terms) == 8
        for coeff, string in terms:
            assert abs(coeff) == pytest.approx(0.125)
            assert string.count("Y") % 2 == odd
            assert string.count("Z") == 0
            assert set(string.letter_map) == {1, 2, 3, 4}

    def test_real_component_on_bell_pairs(self):
        # K_12 = 1/4 for the r = 4 extreme AGP state
        real = terms_to_sum(pauli_expansion_pair_hopper(1, 2, Component.REAL, 4), 4)
        imag = terms_to_sum(pauli_expansion_pair_hopper(1, 2, Component.IMAGINARY, 4), 4)
        state = prepare_agp(4)
        assert expectation(state, real).real == pytest.approx(0.5)
        assert expectation(state, imag).real == pytest.approx(0.0, abs=1e-14)

    def test_real_component_moves_a_pair(self):
        real = terms_to_sum(pauli_expansion_pair_hopper(1, 2, Component.REAL, 4), 4)
        moved = real.to_matrix() @ StateVector.basis_state(4, 0b1100).amplitudes
        assert moved[0b0011] == pytest.approx(1)

    def test_same_pair(self):
        with pytest.raises(ValidationError):
            pauli_expansion_pair_hopper(2, 2, Component.REAL)

    def test_diagonal_component_is_rejected(self):
        with pytest.raises(ValidationError):
            pauli_expansion_pair_hopper(1, 2, Component.DIAGONAL)


class TestDiagonalOccupation:
    def test_terms(self):
        terms = diagonal_pair_occupation(1)
        assert len(terms) == 4
        assert all(abs(coeff) == pytest.approx(0.25) for coeff, _ in terms)

    def test_projects_on_doubly_occupied_pair(self):
        matrix = terms_to_sum(diagonal_pair_occupation(2, 4), 4).to_matrix()
        expected = np.diag([1.0 if (b >> 2) & 0b11 == 0b11 else 0.0 for b in range(16)])
        np.testing.assert_allclose(matrix, expected, atol=1e-15)


class TestNormalOrdering:
    def test_sign_of_single_swap(self):
        sign, op = FermionOp.parse("1^ 2^").normal_ordered()
        assert sign == -1
        assert str(op) == "2^ 1^"

    def test_already_ordered(self):
        sign, op = FermionOp.parse("3^ 1^ 2 4").normal_ordered()
        assert sign == 1
        assert str(op) == "3^ 1^ 2 4"

    def test_annihilator_moves_right(self):
        sign, op = FermionOp.parse("2 3^").normal_ordered()
        assert sign == -1
        assert str(op) == "3^ 2"

    def test_repeated_operator_vanishes(self):
        sign, _ = FermionOp.parse("2^ 1 2^").normal_ordered()
        assert sign == 0

    def test_contraction_is_rejected(self):
        with pytest.raises(ValidationError):
            FermionOp.parse("1 1^").normal_ordered()

    def test_reordering_preserves_the_operator(self):
        original = FermionOp.parse("1 4^ 2^ 3")
        sign, ordered = original.normal_ordered()
        np.testing.assert_allclose(
            original.to_matrix(4), sign * ordered.to_matrix(4), atol=1e-14
        )

    def test_bare_operators_commute_without_sign(self):
        sign, _ = FermionOp.parse("1^ 2^", with_strings=False).normal_ordered()
        assert sign == 1

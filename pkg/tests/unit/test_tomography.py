import numpy as np
import pytest

from agp_tomography.exceptions import ValidationError
from agp_tomography.pairing import Component, pauli_expansion_pair_hopper, terms_to_sum
from agp_tomography.rdm import assemble_exact
from agp_tomography.statevector import (
    GateKind,
    StateVector,
    exact_distribution,
    expectation,
    prepare_agp,
    project_particle_number,
)
from agp_tomography.tomography import (
    DIAGONAL_DECODE,
    derive_decode,
    estimate_entry,
    estimates_from_histograms,
    joint_rotation,
    pair_setting,
    plan_settings,
    rotation_unitary,
)

pytestmark = pytest.mark.unit


def random_state(num_qubits, seed):
    rng = np.random.default_rng(seed)
    amplitudes = rng.normal(size=1 << num_qubits) + 1j * rng.normal(size=1 << num_qubits)
    return StateVector(num_qubits, amplitudes / np.linalg.norm(amplitudes))


class TestPlanSettings:
    @pytest.mark.parametrize("r,count", [(2, 1), (4, 3), (6, 7), (14, 43)])
    def test_setting_count(self, r, count):
        assert len(plan_settings(r)) == count

    def test_order(self):
        labels = [s.label for s in plan_settings(6)]
        assert labels == [
            "diagonal",
            "pair1_2_re",
            "pair1_2_im",
            "pair1_3_re",
            "pair1_3_im",
            "pair2_3_re",
            "pair2_3_im",
        ]

    @pytest.mark.parametrize("r", [0, 3, 5])
    def test_invalid_register(self, r):
        with pytest.raises(ValidationError):
            plan_settings(r)

    def test_rotation_touches_only_the_two_pairs(self):
        setting = pair_setting(1, 3, Component.IMAGINARY, 6)
        touched = {t for gate in setting.rotation.gates for t in gate.targets}
        assert touched <= {1, 2, 5, 6}
        assert setting.qubits == (1, 2, 5, 6)

    def test_rotation_uses_exportable_gates(self):
        kinds = {gate.kind for gate in joint_rotation(Component.IMAGINARY).gates}
        assert kinds <= {GateKind.H, GateKind.S, GateKind.SDG, GateKind.T, GateKind.TDG, GateKind.CNOT}

    def test_diagonal_has_no_joint_rotation(self):
        with pytest.raises(ValidationError):
            joint_rotation(Component.DIAGONAL)


class TestDecode:
    @pytest.mark.parametrize("component", [Component.REAL, Component.IMAGINARY])
    def test_eigenvalue_outcomes(self, component):
        table = derive_decode(component)
        eigenvalues = [eigenvalue for eigenvalue, _ in table]
        assert eigenvalues.count(1) == 1
        assert eigenvalues.count(-1) == 1
        for eigenvalue, number in table:
            if eigenvalue:
                assert number == 2

    @pytest.mark.parametrize("component", [Component.REAL, Component.IMAGINARY])
    def test_local_numbers_cover_all_sectors(self, component):
        numbers = sorted(number for _, number in derive_decode(component))
        assert numbers == [0, 1, 1, 1, 1, 2, 2, 2, 2, 2, 2, 3, 3, 3, 3, 4]

    @pytest.mark.parametrize("component", [Component.REAL, Component.IMAGINARY])
    def test_rotation_diagonalizes_the_hopper(self, component):
        # U O U^dag is diagonal with the decoded eigenvalues
        unitary = rotation_unitary(joint_rotation(component))
        operator = terms_to_sum(pauli_expansion_pair_hopper(1, 2, component, 4), 4).to_matrix()
        rotated = unitary @ operator @ unitary.conj().T
        expected = np.diag([eigenvalue for eigenvalue, _ in derive_decode(component)])
        np.testing.assert_allclose(rotated, expected, atol=1e-12)

    def test_diagonal_decode(self):
        assert DIAGONAL_DECODE[0b11] == (1, 2)
        assert DIAGONAL_DECODE[0b00] == (0, 0)


class TestEstimateEntry:
    @pytest.mark.parametrize("component", [Component.REAL, Component.IMAGINARY])
    def test_exact_probabilities_reproduce_expectation(self, component):
        state = random_state(6, seed=4)
        setting = pair_setting(1, 3, component, 6)
        histogram = exact_distribution(state, setting.rotation)
        estimate = estimate_entry(histogram, setting)
        operator = terms_to_sum(pauli_expansion_pair_hopper(1, 3, component, 6), 6)
        value = expectation(state, operator).real / 2
        observed = estimate.value.real if component is Component.REAL else estimate.value.imag
        assert observed == pytest.approx(value, abs=1e-12)

    def test_post_selection_matches_projected_state(self):
        state = prepare_agp(6)
        settings = plan_settings(6)
        histograms = [(s, exact_distribution(state, s.rotation)) for s in settings]
        for n in (0, 2, 4, 6):
            estimates = estimates_from_histograms(histograms, n_filter=n)
            projected = project_particle_number(state, n).state
            exact = assemble_exact(projected).entries
            assert estimates[(1, 1, Component.DIAGONAL)].value.real == pytest.approx(
                exact[0, 0].real, abs=1e-12
            )
            assert estimates[(1, 2, Component.REAL)].value.real == pytest.approx(
                exact[0, 1].real, abs=1e-12
            )

    def test_counts_and_standard_error(self):
        setting = pair_setting(1, 2, Component.REAL, 4)
        table = derive_decode(Component.REAL)
        plus = table.index((1, 2))
        minus = table.index((-1, 2))
        # local outcome index equals the global one for pairs (1, 2) on 4 qubits
        histogram = {plus: 600, minus: 200, 0: 200}
        estimate = estimate_entry(histogram, setting)
        assert estimate.value.real == pytest.approx((600 - 200) / (2 * 1000))
        variance = ((600 + 200) / 1000 - ((600 - 200) / 1000) ** 2) / 1000
        assert estimate.stderr == pytest.approx(np.sqrt(variance) / 2)
        assert estimate.retained == 1000

    def test_empty_sector_is_flagged(self):
        setting = pair_setting(1, 2, Component.REAL, 4)
        histogram = exact_distribution(prepare_agp(4), setting.rotation)
        estimate = estimate_entry(histogram, setting, n_filter=3)
        assert estimate.empty
        assert estimate.retained == 0

    def test_diagonal_needs_a_pair(self):
        setting = plan_settings(4)[0]
        with pytest.raises(ValidationError):
            estimate_entry({0: 10}, setting)

    def test_diagonal_binomial_estimate(self):
        setting = plan_settings(4)[0]
        histogram = {0b0000: 30, 0b0011: 50, 0b1111: 20}
        estimate = estimate_entry(histogram, setting, pair=2)
        assert estimate.value.real == pytest.approx(0.2)
        assert estimate.stderr == pytest.approx(np.sqrt(0.2 * 0.8 / 100))

    def test_outcome_outside_register(self):
        setting = plan_settings(2)[0]
        with pytest.raises(ValidationError):
            estimate_entry({0b100: 1}, setting, pair=1)

import numpy as np
import pytest

from agp_tomography.exceptions import CapacityError, QubitIndexError, ValidationError
from agp_tomography.pauli import PauliString
from agp_tomography.statevector import (
    Circuit,
    Gate,
    GateKind,
    NoiseModel,
    StateVector,
    agp_circuit,
    apply_circuit,
    apply_gate,
    exact_distribution,
    expectation,
    new_zero_state,
    prepare_agp,
    project_particle_number,
    sample_shots,
)

pytestmark = pytest.mark.unit


@pytest.fixture
def agp4():
    return prepare_agp(4)


class TestRegister:
    def test_zero_state(self):
        state = new_zero_state(3)
        assert state.dim == 8
        assert state.amplitudes[0] == 1
        assert state.norm() == pytest.approx(1.0)

    def test_zero_qubit_register(self):
        state = new_zero_state(0)
        assert state.amplitudes.shape == (1,)

    def test_capacity_cap(self):
        with pytest.raises(CapacityError):
            new_zero_state(25)

    def test_capacity_cap_env_override(self, monkeypatch):
        monkeypatch.setenv("AGP_MAX_QUBITS", "4")
        with pytest.raises(CapacityError):
            new_zero_state(6)
        assert new_zero_state(4).num_qubits == 4

    def test_capacity_cap_env_not_an_integer(self, monkeypatch):
        monkeypatch.setenv("AGP_MAX_QUBITS", "lots")
        assert new_zero_state(2).num_qubits == 2


class TestGates:
    def test_x_on_qubit_one_sets_lowest_bit(self):
        state = apply_gate(new_zero_state(3), Gate(GateKind.X, (1,)))
        assert abs(state.amplitudes[0b001]) == pytest.approx(1.0)

    def test_cnot_control_and_target_order(self):
        state = StateVector.basis_state(2, 0b01)  # qubit 1 set
        state = apply_gate(state, Gate(GateKind.CNOT, (1, 2)))
        assert abs(state.amplitudes[0b11]) == pytest.approx(1.0)

    def test_target_out_of_range(self):
        with pytest.raises(QubitIndexError):
            apply_gate(new_zero_state(2), Gate(GateKind.H, (3,)))

    def test_circuit_rejects_out_of_range_gate(self):
        with pytest.raises(QubitIndexError):
            Circuit(2).cx(1, 3)

    def test_non_unitary_dense_matrix(self):
        with pytest.raises(ValidationError):
            Gate(GateKind.UNITARY1, (1,), np.array([[1, 1], [0, 1]]))

    def test_wrong_arity(self):
        with pytest.raises(ValidationError):
            Gate(GateKind.CNOT, (1,))

    def test_repeated_targets(self):
        with pytest.raises(ValidationError):
            Gate(GateKind.CNOT, (2, 2))

    def test_dense_unitary_matches_fixed_gate(self):
        hadamard = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
        fixed = apply_circuit(new_zero_state(2), Circuit(2).h(2))
        dense = apply_circuit(new_zero_state(2), Circuit(2).unitary(hadamard, 2))
        np.testing.assert_allclose(fixed.amplitudes, dense.amplitudes, atol=1e-15)

    def test_norm_is_preserved(self):
        rng = np.random.default_rng(3)
        circuit = Circuit(4)
        for _ in range(40):
            kind = rng.choice(["h", "s", "t", "tdg", "sdg", "x", "z"])
            getattr(circuit, str(kind))(int(rng.integers(1, 5)))
            a, b = rng.choice(np.arange(1, 5), size=2, replace=False)
            circuit.cx(int(a), int(b))
        state = apply_circuit(new_zero_state(4), circuit)
        assert abs(state.norm() - 1) < 1e-12


class TestAgpPreparation:
    def test_two_qubits_is_bell_pair(self):
        amplitudes = prepare_agp(2).amplitudes
        np.testing.assert_allclose(
            amplitudes, np.array([1, 0, 0, 1]) / np.sqrt(2), atol=1e-15
        )

    def test_odd_register(self):
        with pytest.raises(ValidationError):
            prepare_agp(3)

    def test_circuit_shape(self):
        circuit = agp_circuit(6)
        assert len(circuit) == 6
        assert circuit.count(GateKind.CNOT) == 3

    def test_support_is_pair_occupations(self, agp4):
        support = set(np.flatnonzero(np.abs(agp4.amplitudes) > 1e-12))
        assert support == {0b0000, 0b0011, 0b1100, 0b1111}

    def test_empty_register(self):
        assert prepare_agp(0).amplitudes.tolist() == [1]


class TestExpectation:
    def test_z_on_vacuum(self):
        assert expectation(new_zero_state(2), PauliString.parse("Z1", 2)) == pytest.approx(1)

    def test_bell_pair_correlators(self):
        bell = prepare_agp(2)
        assert expectation(bell, PauliString.parse("X1 X2", 2)).real == pytest.approx(1)
        assert expectation(bell, PauliString.parse("Y1 Y2", 2)).real == pytest.approx(-1)
        assert expectation(bell, PauliString.parse("Z1", 2)).real == pytest.approx(0)


class TestProjection:
    def test_sector_weights(self, agp4):
        weights = [project_particle_number(agp4, n).weight for n in (0, 2, 4)]
        assert weights == pytest.approx([0.25, 0.5, 0.25])

    def test_odd_sector_is_flagged(self, agp4):
        projection = project_particle_number(agp4, 1)
        assert projection.state is None
        assert projection.weight == pytest.approx(0)

    def test_projected_state_is_normalized(self, agp4):
        projection = project_particle_number(agp4, 2)
        assert projection.state is not None
        assert projection.state.norm() == pytest.approx(1)

    def test_weights_sum_to_one_on_random_state(self):
        rng = np.random.default_rng(17)
        amplitudes = rng.normal(size=64) + 1j * rng.normal(size=64)
        state = StateVector(6, amplitudes / np.linalg.norm(amplitudes))
        projections = [project_particle_number(state, n) for n in range(7)]
        assert sum(p.weight for p in projections) == pytest.approx(1.0, abs=1e-12)
        for projection in projections:
            assert projection.state.norm() == pytest.approx(1.0)

    def test_particle_number_out_of_range(self, agp4):
        with pytest.raises(ValidationError):
            project_particle_number(agp4, 5)


class TestSampling:
    def test_bell_pair_statistics(self):
        histogram = sample_shots(prepare_agp(2), Circuit(2), 100_000, seed=11)
        assert set(histogram) <= {0b00, 0b11}
        sigma = np.sqrt(0.25 / 100_000)
        for outcome in (0b00, 0b11):
            assert abs(histogram[outcome] / 100_000 - 0.5) < 5 * sigma

    def test_vacuum(self):
        assert sample_shots(new_zero_state(3), Circuit(3), 500, seed=1) == {0: 500}

    def test_deterministic_for_fixed_seed(self, agp4):
        noise = NoiseModel(p1=0.01, p2=0.05, readout_01=0.02, readout_10=0.03)
        a = sample_shots(agp4, agp_circuit(4), 2000, noise, seed=5)
        b = sample_shots(agp4, agp_circuit(4), 2000, noise, seed=5)
        assert a == b
        assert sum(a.values()) == 2000

    def test_total_variation_converges(self):
        state = prepare_agp(6)
        rotation = Circuit(6).h(1).s(3).h(3).cx(2, 5)
        probabilities = apply_circuit(state, rotation).probabilities()
        shots = 40_000
        histogram = sample_shots(state, rotation, shots, seed=3)
        empirical = np.zeros_like(probabilities)
        for outcome, count in histogram.items():
            empirical[outcome] = count / shots
        assert 0.5 * np.abs(empirical - probabilities).sum() < 5 / np.sqrt(shots)

    def test_readout_noise_flips_bits(self):
        noise = NoiseModel(readout_01=1.0)
        assert sample_shots(new_zero_state(2), Circuit(2), 100, noise, seed=0) == {0b11: 100}

    def test_readout_rate_per_bit(self):
        shots = 200_000
        noise = NoiseModel(readout_01=0.1)
        histogram = sample_shots(new_zero_state(3), Circuit(3), shots, noise, seed=4)
        sigma = np.sqrt(0.1 * 0.9 / shots)
        for bit in range(3):
            ones = sum(count for outcome, count in histogram.items() if outcome >> bit & 1)
            assert abs(ones / shots - 0.1) < 5 * sigma

    def test_gate_noise_spreads_outcomes(self):
        noise = NoiseModel(p1=0.5, p2=0.5)
        histogram = sample_shots(new_zero_state(2), agp_circuit(2), 4000, noise, seed=2)
        assert set(histogram) - {0b00, 0b11}

    def test_invalid_shots(self):
        with pytest.raises(ValidationError):
            sample_shots(new_zero_state(1), Circuit(1), 0)

    def test_exact_distribution(self):
        distribution = exact_distribution(prepare_agp(2), Circuit(2))
        assert distribution == pytest.approx({0: 0.5, 3: 0.5})


class TestNoiseModel:
    def test_probability_range(self):
        with pytest.raises(ValidationError):
            NoiseModel(p1=1.5)

    def test_packaged_preset(self):
        noise = NoiseModel.from_preset("device-like")
        assert noise.p2 == pytest.approx(0.02)
        assert noise.readout_10 == pytest.approx(0.03)
        assert NoiseModel.from_preset("ideal").is_ideal

    def test_unknown_preset(self):
        with pytest.raises(ValidationError):
            NoiseModel.from_preset("cryostat")

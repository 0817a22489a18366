import math

import numpy as np
import pytest
from scipy.linalg import expm

import oracles
from fermiforge.circuits import Circuit, Gate
from fermiforge.errors import LifecycleError, SymmetryError, ValidationError
from fermiforge.mappings import MappingConfig, exact_ground_energy
from fermiforge.operators import FermionOperator, QubitOperator, word_from_string
from fermiforge.simulator import BackendConfig
from fermiforge.vqe import (RESOURCE_KEYS, AnsatzSpec, HEAOptions,
                            OptimizerSettings, QCCGeneratorSet, QCCOptions,
                            VQEConfig, VQESolver, basis_state_expectation,
                            hea_build_circuit, pauli_exponential_circuit,
                            qcc_build_circuit, qcc_gradient,
                            qcc_screen_generators, reference_circuit)


def jw_mapping():
    return MappingConfig("JW", 4, n_electrons=2)


def h2_qcc_config(h2, **kwargs):
    defaults = dict(
        fermion_operator=h2.fermion_operator,
        mapping=jw_mapping(),
        ansatz=AnsatzSpec("QCC", qcc=QCCOptions(deqcc_dtau_thresh=1e-3)),
        optimizer=OptimizerSettings(tolerance=1e-10, max_evals=20000),
    )
    defaults.update(kwargs)
    return VQEConfig(**defaults)


class TestBuildLifecycle:
    def test_resources_before_build_rejected(self, h2):
        solver = VQESolver(h2_qcc_config(h2))
        with pytest.raises(LifecycleError):
            solver.get_resources()
        with pytest.raises(LifecycleError):
            solver.energy_estimation([0.0])

    def test_build_produces_report_without_simulation(self, h2):
        config = VQEConfig(
            fermion_operator=h2.fermion_operator,
            mapping=jw_mapping(),
            ansatz=AnsatzSpec("HEA", hea=HEAOptions(n_layers=1)),
        )
        solver = VQESolver(config)
        solver.build()
        report = solver.get_resources()
        assert tuple(report) == RESOURCE_KEYS
        assert solver.energy_trace == []  # nothing simulated yet
        assert report["circuit_width"] == 4

    def test_qcc_empty_generator_set_rejected(self, h2):
        config = h2_qcc_config(h2)
        config.ansatz.qcc.deqcc_dtau_thresh = 1e3
        with pytest.raises(ValidationError, match="empty generator set"):
            VQESolver(config).build()

    def test_qcc_generators_pass_threshold(self, h2):
        solver = VQESolver(h2_qcc_config(h2))
        solver.build()
        generators = solver.generator_set
        assert generators.n_generators >= 1
        assert all(abs(g) >= 1e-3 for g in generators.gradients)

    def test_scbk_symmetry_violation_surfaces_at_build(self):
        broken = FermionOperator("0^") + FermionOperator("0")
        config = VQEConfig(
            fermion_operator=broken,
            mapping=MappingConfig("scBK", 4, n_electrons=2, up_then_down=True),
            ansatz=AnsatzSpec("HEA"),
        )
        with pytest.raises(SymmetryError):
            VQESolver(config).build()

    def test_reference_length_mismatch_rejected(self, h2):
        config = h2_qcc_config(h2, reference_bitstring="110")
        with pytest.raises(ValidationError):
            VQESolver(config).build()

    def test_hamiltonian_required(self):
        with pytest.raises(ValidationError):
            VQEConfig()


class TestScreening:
    def test_one_qubit_analytic_gradient(self):
        # H = Z0, reference |0>: [Y0, Z0] = -2i X0 whose |0> expectation is 0
        assert qcc_gradient(word_from_string("Y0"), QubitOperator("Z0"), "0") == 0.0
        # H = X0: [Y0, X0] = -2i Z0, gradient = (i/2)(-2i)<Z0> = <Z0> = 1
        assert qcc_gradient(word_from_string("Y0"), QubitOperator("X0"), "0") == pytest.approx(1.0)

    def test_gradients_match_finite_differences(self, h2):
        bits = "1100"
        hamiltonian = h2.qubit_operator_jw
        generators = qcc_screen_generators(hamiltonian, bits, threshold=1e-4)
        assert generators.n_generators >= 1
        step = 1e-5
        for word, gradient in zip(generators.generators, generators.gradients):
            energies = []
            for tau in (step, -step):
                circuit = reference_circuit(bits) + pauli_exponential_circuit(word, tau)
                from fermiforge.simulator import get_expectation_value

                energies.append(get_expectation_value(hamiltonian, circuit))
            numeric = (energies[0] - energies[1]) / (2 * step)
            assert abs(numeric - gradient) < 1e-6

    def test_sorting_stable_with_lexicographic_ties(self):
        hamiltonian = QubitOperator("X0", 0.5) + QubitOperator("X1", 0.5)
        generators = qcc_screen_generators(hamiltonian, "00", threshold=1e-6, max_gens=10)
        magnitudes = [abs(g) for g in generators.gradients]
        assert magnitudes == sorted(magnitudes, reverse=True)
        for first, second in zip(generators.generators, generators.generators[1:]):
            g1 = abs(generators.gradients[generators.generators.index(first)])
            g2 = abs(generators.gradients[generators.generators.index(second)])
            if abs(g1 - g2) <= 1e-10:
                assert first < second

    def test_candidate_sets_collapse_without_max(self):
        # X0 and X1 give two candidates of equal |gradient|; only one kept
        hamiltonian = QubitOperator("X0", 0.5) + QubitOperator("X1", 0.5)
        unlimited = qcc_screen_generators(hamiltonian, "00", threshold=1e-6)
        capped = qcc_screen_generators(hamiltonian, "00", threshold=1e-6, max_gens=2)
        assert unlimited.n_generators == 1
        assert capped.n_generators == 2


class TestCircuitConstruction:
    def test_zero_angle_preserves_reference(self):
        generators = QCCGeneratorSet([word_from_string("Y0")], [1.0], np.zeros(1))
        circuit = qcc_build_circuit(generators, "10")
        state = oracles.circuit_statevector(circuit, 2)
        reference = np.zeros(4, dtype=complex)
        reference[0b01] = 1.0  # qubit 0 occupied
        assert abs(np.vdot(reference, state)) ** 2 > 1 - 1e-12

    def test_exponential_matches_dense_matrix(self):
        word = word_from_string("Y0 X1")
        tau = math.pi / 2
        circuit = pauli_exponential_circuit(word, tau, variational=False)
        achieved = oracles.circuit_unitary(circuit, 2)
        expected = expm(-1j * tau / 2 * oracles.word_matrix(word, 2))
        assert np.max(np.abs(achieved - expected)) < 1e-10

    def test_exponential_on_reference_state(self):
        word = word_from_string("Y0 X1")
        circuit = Circuit(n_qubits=2) + pauli_exponential_circuit(word, math.pi / 2)
        state = oracles.circuit_statevector(circuit, 2)
        expected = expm(-1j * math.pi / 4 * oracles.word_matrix(word, 2)) @ \
            np.eye(4, dtype=complex)[:, 0]
        assert np.allclose(state, expected, atol=1e-10)

    def test_var_gate_count_without_bloch_layer(self):
        generators = QCCGeneratorSet(
            [word_from_string("Y0 X1"), word_from_string("Y1 X2")], [0.5, 0.4], np.zeros(2))
        circuit = qcc_build_circuit(generators, "000")
        assert len(circuit.variational_gates) == 2

    def test_var_gate_count_with_bloch_layer(self):
        generators = QCCGeneratorSet([word_from_string("Y0 X1")], [0.5], np.zeros(1),
                                     bloch_layer=True)
        circuit = qcc_build_circuit(generators, "000")
        assert len(circuit.variational_gates) == 1 + 2 * 3

    def test_two_qubit_generator_uses_two_cnots(self, h2):
        generators = QCCGeneratorSet([word_from_string("X0 Y1")], [0.5], np.zeros(1))
        config = VQEConfig(
            qubit_hamiltonian=QubitOperator("Z0") + QubitOperator("Z1"),
            ansatz=AnsatzSpec("CUSTOM", custom_circuit=qcc_build_circuit(generators, "00")),
            reference_bitstring="00",
        )
        solver = VQESolver(config)
        solver.build()
        report = solver.get_resources()
        assert report["circuit_width"] == 2
        assert report["circuit_2qubit_gates"] == 2
        assert report["vqe_variational_parameters"] == 1

    def test_hea_layer_structure(self):
        circuit = hea_build_circuit("0011", HEAOptions(n_layers=2, rotation_axes=("RY",)))
        counts = circuit.counts
        assert counts["RY"] == 3 * 4  # two layers plus the closing layer
        assert counts["CNOT"] == 2 * 3


class TestSimulateAndEstimate:
    def test_single_qubit_toy_reaches_minus_one(self):
        config = VQEConfig(
            qubit_hamiltonian=QubitOperator("Z0"),
            ansatz=AnsatzSpec("CUSTOM", custom_circuit=Circuit(
                [Gate("RY", 0, parameter=0.0, is_variational=True)])),
            reference_bitstring="0",
            optimizer=OptimizerSettings(tolerance=1e-12),
        )
        solver = VQESolver(config)
        solver.build()
        report = solver.get_resources()
        assert report == {
            "qubit_hamiltonian_terms": 1,
            "circuit_width": 1,
            "circuit_gates": 1,
            "circuit_2qubit_gates": 0,
            "circuit_var_gates": 1,
            "vqe_variational_parameters": 1,
        }
        assert solver.simulate() == pytest.approx(-1.0, abs=1e-8)

    def test_qcc_reaches_fci_on_h2(self, h2):
        solver = VQESolver(h2_qcc_config(h2))
        solver.build()
        energy = solver.simulate()
        assert energy == pytest.approx(h2.fci_energy, abs=1e-6)

    def test_deterministic_rerun(self, h2):
        first = VQESolver(h2_qcc_config(h2))
        first.build()
        e1 = first.simulate()
        second = VQESolver(h2_qcc_config(h2))
        second.build()
        assert second.simulate() == e1

    def test_variational_bound(self, h2):
        solver = VQESolver(h2_qcc_config(h2))
        solver.build()
        energy = solver.simulate()
        assert energy >= exact_ground_energy(solver.qubit_hamiltonian) - 1e-9

    def test_best_so_far_trace_monotone(self, h2):
        solver = VQESolver(h2_qcc_config(h2))
        solver.build()
        solver.simulate()
        trace = solver.best_so_far_trace()
        assert all(a >= b for a, b in zip(trace, trace[1:]))
        assert len(trace) == len(solver.energy_trace)

    def test_zero_tau_equals_reference_energy(self, h2):
        solver = VQESolver(h2_qcc_config(h2))
        solver.build()
        reference_energy = basis_state_expectation(solver.qubit_hamiltonian, "1100")
        assert solver.energy_estimation(np.zeros(len(solver.initial_var_params))) == \
            pytest.approx(reference_energy, abs=1e-10)
        assert reference_energy == pytest.approx(h2.hf_energy, abs=1e-10)

    def test_optimal_params_reproduce_reported_energy(self, h2):
        solver = VQESolver(h2_qcc_config(h2))
        solver.build()
        energy = solver.simulate()
        assert solver.energy_estimation(solver.optimal_var_params) == pytest.approx(energy, abs=1e-12)

    def test_parameter_length_mismatch_rejected(self, h2):
        solver = VQESolver(h2_qcc_config(h2))
        solver.build()
        with pytest.raises(ValidationError):
            solver.energy_estimation([0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7])

    def test_exact_and_shot_backends_agree(self, h2):
        solver = VQESolver(h2_qcc_config(h2))
        solver.build()
        params = np.full(len(solver.initial_var_params), 0.1)
        exact = solver.energy_estimation(params)
        shots = 100_000
        solver.config.backend = BackendConfig(n_shots=shots, seed=5)
        noisy = solver.energy_estimation(params)
        sigma = math.sqrt(sum(c.real ** 2 for w, c in solver.qubit_hamiltonian if w) / shots)
        assert abs(noisy - exact) < 5 * sigma

    def test_scaling_hamiltonian_scales_energy(self):
        base = QubitOperator("Z0", 0.75) + QubitOperator("X0", 0.35)
        ansatz = AnsatzSpec("CUSTOM", custom_circuit=Circuit(
            [Gate("RY", 0, parameter=0.0, is_variational=True)]))
        results = []
        for scale in (1.0, 2.0):
            config = VQEConfig(qubit_hamiltonian=scale * base, ansatz=ansatz,
                               reference_bitstring="0",
                               optimizer=OptimizerSettings(tolerance=1e-12))
            solver = VQESolver(config)
            solver.build()
            energy = solver.simulate()
            circuit = solver.circuit.copy()
            circuit.bind_variational(solver.optimal_var_params)
            results.append((energy, oracles.circuit_statevector(circuit, 1)))
        (e1, psi1), (e2, psi2) = results
        assert e2 == pytest.approx(2 * e1, abs=1e-8)
        assert abs(np.vdot(psi1, psi2)) ** 2 >= 1 - 1e-6

    def test_spsa_improves_over_start(self):
        config = VQEConfig(
            qubit_hamiltonian=QubitOperator("Z0"),
            ansatz=AnsatzSpec("CUSTOM", custom_circuit=Circuit(
                [Gate("RY", 0, parameter=0.0, is_variational=True)])),
            reference_bitstring="0",
            initial_var_params=[1.5],
            optimizer=OptimizerSettings(method="spsa", max_evals=600, seed=4),
            backend=BackendConfig(n_shots=2000, seed=8),
        )
        solver = VQESolver(config)
        solver.build()
        energy = solver.simulate()
        assert energy < solver.energy_trace[0]


class TestHEA:
    def test_hea_reaches_fci_on_h2(self, h2):
        config = VQEConfig(
            fermion_operator=h2.fermion_operator,
            mapping=jw_mapping(),
            ansatz=AnsatzSpec("HEA", hea=HEAOptions(n_layers=2, rotation_axes=("RY",),
                                                    entangler="linear_cz")),
            initial_var_params="random",
            optimizer=OptimizerSettings(tolerance=1e-10, max_evals=30000, seed=0),
        )
        solver = VQESolver(config)
        solver.build()
        assert solver.simulate() == pytest.approx(h2.fci_energy, abs=1e-6)


class TestInitialParameters:
    def test_zeros_policy(self, h2):
        solver = VQESolver(h2_qcc_config(h2, initial_var_params="zeros"))
        solver.build()
        assert np.all(solver.initial_var_params == 0)

    def test_random_policy_respects_tau_guess(self, h2):
        config = h2_qcc_config(h2, initial_var_params="random")
        config.ansatz.qcc.tau_guess = 1e-2
        config.optimizer.seed = 3
        solver = VQESolver(config)
        solver.build()
        assert np.all(np.abs(solver.initial_var_params) <= 1e-2)
        assert np.any(solver.initial_var_params != 0)

    def test_explicit_list(self, h2):
        solver = VQESolver(h2_qcc_config(h2, initial_var_params=[0.05]))
        solver.build()
        assert solver.initial_var_params.tolist() == [0.05]

    def test_wrong_length_rejected(self, h2):
        solver = VQESolver(h2_qcc_config(h2, initial_var_params=[0.1, 0.2, 0.9]))
        with pytest.raises(ValidationError):
            solver.build()

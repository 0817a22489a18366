import math

import numpy as np
import pytest

import oracles
from fermiforge.circuits import Circuit, Gate, concat, inverse, repeat, split, stack
from fermiforge.errors import UnsupportedGateError, ValidationError
from fermiforge.simulator import BackendConfig, simulate


def paper_gates():
    return [
        Gate("H", 2),
        Gate("CNOT", 1, control=0),
        Gate("CNOT", target=2, control=1),
        Gate("Y", 0),
        Gate("RX", 1, parameter=2.0),
    ]


def circuit3():
    return Circuit(paper_gates()) + Circuit([Gate("RZ", 4, parameter="alpha", is_variational=True)])


class TestGate:
    def test_rendering_tokens(self):
        gate = Gate("RZ", 1, parameter="an expression", is_variational=True)
        text = str(gate)
        assert text.startswith("RZ")
        for token in ("target : 1", "parameter : an expression", "(variational)"):
            assert token in text

    def test_h_gate_width_contribution(self):
        assert Circuit([Gate("H", 2)]).width == 3

    def test_control_rendering(self):
        assert "control : 0" in str(Gate("CNOT", 1, control=0))

    def test_overlapping_target_control_rejected(self):
        with pytest.raises(ValidationError):
            Gate("CNOT", 1, control=1)

    def test_negative_index_rejected(self):
        with pytest.raises(ValidationError):
            Gate("H", -1)

    def test_duplicate_targets_rejected(self):
        with pytest.raises(ValidationError):
            Gate("SWAP", [0, 0])

    def test_arbitrary_names_accepted_at_construction(self):
        gate = Gate("MYGATE", 0)
        assert gate.name == "MYGATE"

    def test_names_uppercased(self):
        assert Gate("h", 0).name == "H"


class TestCircuitIntrospection:
    def test_circuit3_golden(self):
        c = circuit3()
        assert c.size == 6
        assert c.width == 5
        assert c.is_variational is True
        assert c.counts == {"H": 1, "CNOT": 2, "Y": 1, "RX": 1, "RZ": 1}

    def test_variational_view_binds_through(self):
        c = circuit3()
        assert len(c.variational_gates) == 1
        c.variational_gates[0].parameter = 777.0
        assert "parameter : 777.0\t (variational)" in repr(c)

    def test_no_tags_empty_view(self):
        assert Circuit(paper_gates()).variational_gates == []

    def test_bind_then_simulate(self):
        c = Circuit([Gate("RY", 0, parameter="theta", is_variational=True)])
        c.bind_variational([math.pi])
        histogram, _ = simulate(c)
        assert histogram == pytest.approx({"1": 1.0})

    def test_add_gate_matches_list_construction(self):
        c1 = Circuit()
        for gate in paper_gates():
            c1.add_gate(gate)
        assert c1 == Circuit(paper_gates())


class TestConcatRepeat:
    def test_concat_golden(self):
        c = concat(Circuit(paper_gates()),
                   Circuit([Gate("RZ", 4, parameter=0.1, is_variational=True)]))
        assert c.size == 6 and c.width == 5
        assert c.counts == {"H": 1, "CNOT": 2, "Y": 1, "RX": 1, "RZ": 1}

    def test_concat_empty(self):
        assert (Circuit() + Circuit()).size == 0

    def test_concat_associative(self):
        rng = np.random.default_rng(3)
        a, b, c = (oracles.random_circuit(rng, 3, 4) for _ in range(3))
        assert (a + b) + c == a + (b + c)

    def test_concat_inverse_returns_to_zero(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            c = oracles.random_circuit(rng, 3, 12)
            histogram, state = simulate(c + c.inverse(), return_statevector=True)
            assert abs(state[0]) ** 2 >= 1 - 1e-10
            assert histogram == pytest.approx({"000": 1.0})

    def test_repeat_zero_and_one(self):
        c = Circuit(paper_gates())
        assert (c * 0).size == 0
        assert c * 1 == c

    def test_repeat_is_concat_fold(self):
        c = Circuit(paper_gates())
        assert c * 3 == c + c + c

    def test_repeated_bell_matches_dense_oracle(self):
        # Bell preparation is not an involution: check the true statevector
        bell = Circuit([Gate("H", 0), Gate("CNOT", 1, control=0)])
        _, state = simulate(bell * 2, return_statevector=True)
        expected = oracles.circuit_statevector(bell * 2)
        assert np.allclose(state, expected, atol=1e-12)
        assert abs(expected[0]) ** 2 < 0.999  # genuinely not |00>

    def test_negative_repeat_rejected(self):
        with pytest.raises(ValidationError):
            Circuit(paper_gates()) * (-1)


class TestInverse:
    def test_self_inverse_gate(self):
        assert inverse(Circuit([Gate("H", 0)])) == Circuit([Gate("H", 0)])

    def test_reversal_and_negation(self):
        c = Circuit([Gate("RX", 0, parameter=0.5), Gate("CNOT", 1, control=0)])
        expected = Circuit([Gate("CNOT", 1, control=0), Gate("RX", 0, parameter=-0.5)])
        assert c.inverse() == expected

    def test_unitary_roundtrip_random(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            c = oracles.random_circuit(rng, 3, 20)
            u = oracles.circuit_unitary(c, 3)
            u_inv = oracles.circuit_unitary(c.inverse(), 3)
            assert np.allclose(u_inv @ u, np.eye(8), atol=1e-10)

    def test_involution(self):
        rng = np.random.default_rng(8)
        c = oracles.random_circuit(rng, 3, 15)
        assert c.inverse().inverse() == c

    def test_dagger_names(self):
        c = Circuit([Gate("S", 0), Gate("T", 1)])
        assert [g.name for g in c.inverse().gates] == ["TDAG", "SDAG"]

    def test_measure_has_no_inverse(self):
        with pytest.raises(UnsupportedGateError):
            Circuit([Gate("MEASURE", 0)]).inverse()

    def test_unbound_parameter_rejected(self):
        with pytest.raises(UnsupportedGateError):
            Circuit([Gate("RZ", 0, parameter="alpha", is_variational=True)]).inverse()


class TestSplitStack:
    def test_two_isolated_qubits(self):
        parts = split(Circuit([Gate("H", 0), Gate("X", 2)]))
        assert [p.width for p in parts] == [1, 1]

    def test_entangling_edge(self):
        parts = split(Circuit([Gate("H", 0), Gate("CNOT", 1, control=0), Gate("X", 2)]))
        assert [p.width for p in parts] == [2, 1]
        assert parts[0].counts == {"H": 1, "CNOT": 1}
        assert parts[1].counts == {"X": 1}

    def test_components_ordered_by_smallest_qubit(self):
        parts, mapping = split(
            Circuit([Gate("X", 5), Gate("H", 0), Gate("CNOT", 5, control=2)]),
            return_map=True,
        )
        assert mapping[0] == (0, 0)
        assert mapping[2] == (1, 0) and mapping[5] == (1, 1)

    def test_tensor_product_reconstruction(self):
        rng = np.random.default_rng(21)
        for _ in range(10):
            c = oracles.random_circuit(rng, 6, 14)
            parts, mapping = c.split(return_map=True)
            whole = oracles.circuit_statevector(c, c.width)
            # permute the tensor product of the parts back to original indices
            part_states = [oracles.circuit_statevector(p, p.width) for p in parts]
            offsets = np.cumsum([0] + [p.width for p in parts])
            used = sorted(mapping)
            combined = part_states[0]
            for state in part_states[1:]:
                combined = np.kron(state, combined)  # later parts more significant
            dim = 1 << c.width
            reordered = np.zeros(dim, dtype=complex)
            for packed in range(len(combined)):
                original = 0
                for old in used:
                    comp, new = mapping[old]
                    if (packed >> (offsets[comp] + new)) & 1:
                        original |= 1 << old
                reordered[original] = combined[packed]
            assert np.allclose(np.abs(reordered) ** 2, np.abs(whole) ** 2, atol=1e-10)

    def test_stack_width_additivity(self):
        wide = stack([Circuit(n_qubits=2), Circuit(n_qubits=3)])
        assert wide.width == 5

    def test_stack_single_identity(self):
        c = Circuit(paper_gates())
        assert stack([c]) == c

    def test_stack_bell_product_distribution(self):
        bell = Circuit([Gate("H", 0), Gate("CNOT", 1, control=0)])
        histogram, _ = simulate(stack([bell, bell]))
        single, _ = simulate(bell)
        expected = {
            b2 + b1: single[b1] * single[b2] for b1 in single for b2 in single
        }
        assert histogram == pytest.approx(expected)

    def test_split_stack_preserves_per_qubit_sequences(self):
        rng = np.random.default_rng(33)
        for _ in range(10):
            c = oracles.random_circuit(rng, 5, 12)
            parts, mapping = c.split(return_map=True)
            rebuilt = stack(parts)
            offsets = np.cumsum([0] + [p.width for p in parts])

            def sequence(circuit, qubit):
                return [(g.name, g.parameter) for g in circuit.gates if qubit in g.qubits]

            for old, (comp, new) in mapping.items():
                assert sequence(c, old) == sequence(rebuilt, int(offsets[comp]) + new)


class TestSerialization:
    def test_json_roundtrip(self):
        c = circuit3()
        again = Circuit.from_dict(c.to_dict())
        assert again == c and again.width == c.width

    def test_declared_width_serialized(self):
        c = Circuit([Gate("H", 0)], n_qubits=4)
        assert Circuit.from_dict(c.to_dict()).width == 4


def test_simulating_unknown_gate_rejected():
    with pytest.raises(UnsupportedGateError):
        simulate(Circuit([Gate("MYGATE", 0)]))


def test_repeat_keeps_declared_width():
    c = Circuit([Gate("H", 0)], n_qubits=3)
    assert (c * 2).width == 3

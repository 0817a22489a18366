import numpy as np
import pytest

import oracles
from fermiforge.circuits import Circuit, Gate
from fermiforge.errors import ValidationError
from fermiforge.measurements import (compatible_parents, get_measurement_estimate,
                                     group_parent, group_qwc, plan_measurements,
                                     pooled_expectation, total_shots)
from fermiforge.operators import QubitOperator, qwc_compatible, word_from_string
from fermiforge.simulator import (BackendConfig,
                                  expectation_from_frequencies_oneterm, simulate)

PAPER_GROUPS = {
    word_from_string("X0 X1"): {word_from_string("X0 X1")},
    word_from_string("X0 Z1"): {word_from_string("X0"), word_from_string("X0 Z1"),
                                word_from_string("Z1")},
    word_from_string("Y0 Y1"): {word_from_string("Y0 Y1")},
    word_from_string("Z0 X1"): {word_from_string("Z0"), word_from_string("Z0 X1"),
                                word_from_string("X1")},
    word_from_string("Z0 Z1"): {word_from_string("Z0 Z1")},
}


class TestGroupQwc:
    def test_paper_operator_seed_zero(self, rdm_operator_9term):
        mapping = group_qwc(rdm_operator_9term, seed=0)
        assert len(mapping) == 5
        assert {parent: set(sub.terms) for parent, sub in mapping.items()} == PAPER_GROUPS
        mixed_group = mapping[word_from_string("X0 Z1")]
        assert all(coeff == 0.25 for coeff in mixed_group.terms.values())

    def test_pairwise_incompatible_words_stay_singletons(self):
        op = QubitOperator("X0") + QubitOperator("Y0") + QubitOperator("Z0")
        mapping = group_qwc(op, seed=0)
        assert len(mapping) == 3
        assert all(len(sub.terms) == 1 for sub in mapping.values())

    def test_group_count_over_100_seeds_matches_brute_force(self, rdm_operator_9term):
        words = [w for w in rdm_operator_9term.terms if w]
        minimum = oracles.minimum_clique_cover_size(words)
        assert minimum == 5
        for seed in range(100):
            mapping = group_qwc(rdm_operator_9term, seed=seed)
            assert len(mapping) == minimum
            assert len(mapping) <= len(words)

    def test_coverage_and_parent_validity(self, rdm_operator_9term):
        rng = np.random.default_rng(0)
        operators = [rdm_operator_9term] + [
            oracles.random_hermitian_qubit_operator(rng, 4, 8) for _ in range(5)
        ]
        for op in operators:
            mapping = group_qwc(op, seed=3)
            grouped = [w for sub in mapping.values() for w in sub.terms]
            assert sorted(grouped) == sorted(w for w in op.terms if w)
            for parent, sub in mapping.items():
                for word in sub.terms:
                    assert qwc_compatible(word, parent)

    def test_deterministic_for_fixed_seed(self, rdm_operator_9term):
        first = group_qwc(rdm_operator_9term, seed=17)
        second = group_qwc(rdm_operator_9term, seed=17)
        assert {p: dict(s.terms) for p, s in first.items()} == \
               {p: dict(s.terms) for p, s in second.items()}

    def test_empty_operator_gives_empty_map(self):
        assert group_qwc(QubitOperator.identity(2.0), seed=0) == {}

    def test_group_parent_union(self):
        parent = group_parent([word_from_string("X0"), word_from_string("Z1")])
        assert parent == word_from_string("X0 Z1")


class TestMeasurementEstimates:
    def test_quarter_coefficient_two_digits(self):
        op = QubitOperator("X0 X1", 0.25)
        assert get_measurement_estimate(op, digits=2)[word_from_string("X0 X1")] == 62500

    def test_zero_coefficient_gets_zero_shots(self):
        op = QubitOperator.zero()
        op.terms[word_from_string("X0")] = 0j
        assert get_measurement_estimate(op, digits=3)[word_from_string("X0")] == 0

    def test_unit_coefficient_one_digit(self):
        op = QubitOperator("Z0", 1.0)
        assert get_measurement_estimate(op, digits=1)[word_from_string("Z0")] == 10000

    def test_identity_gets_zero(self):
        estimate = get_measurement_estimate(QubitOperator.identity(3.0) + QubitOperator("Z0"))
        assert estimate[()] == 0

    def test_imaginary_coefficient_floors_at_one(self):
        op = QubitOperator("Z0", 1j)
        assert get_measurement_estimate(op, digits=2)[word_from_string("Z0")] == 1

    def test_shot_count_delivers_accuracy_empirically(self):
        # worst case p = 0.5: H|0> measured in Z, 10000 shots per repeat
        shots = get_measurement_estimate(QubitOperator("Z0", 1.0), digits=1)[word_from_string("Z0")]
        word = word_from_string("Z0")
        estimates = []
        for repeat in range(100):
            freqs, _ = simulate(Circuit([Gate("H", 0)]),
                                BackendConfig(n_shots=shots, seed=repeat))
            estimates.append(expectation_from_frequencies_oneterm(word, freqs))
        assert np.std(estimates) <= 1e-2 * 1.5  # target standard error 10^-(digits+1)

        # the |0> eigenstate case is deterministic: zero spread
        fixed = []
        for repeat in range(100):
            freqs, _ = simulate(Circuit([Gate("X", 0), Gate("X", 0)]),
                                BackendConfig(n_shots=shots, seed=repeat))
            fixed.append(expectation_from_frequencies_oneterm(word, freqs))
        assert np.std(fixed) <= 1e-2

    def test_negative_digits_rejected(self):
        with pytest.raises(ValidationError):
            get_measurement_estimate(QubitOperator("Z0"), digits=-1)


class TestPlans:
    def test_paper_operator_plan(self, rdm_operator_9term):
        plan = plan_measurements(rdm_operator_9term, seed=0, digits=2)
        assert len(plan) == 5
        for members in plan.values():
            assert all(shots == 62500 for shots in members.values())

    def test_single_term_plan(self):
        plan = plan_measurements(QubitOperator("X0 Y1", 0.5), seed=1, digits=2)
        assert len(plan) == 1
        (members,) = plan.values()
        assert list(members.values()) == [250000]

    def test_grouped_total_never_exceeds_ungrouped(self):
        rng = np.random.default_rng(2)
        for _ in range(10):
            op = oracles.random_hermitian_qubit_operator(rng, 4, 10)
            plan = plan_measurements(op, seed=5, digits=2)
            flat = get_measurement_estimate(op, digits=2)
            ungrouped_total = sum(s for w, s in flat.items() if w)
            assert total_shots(plan) <= ungrouped_total


class TestPooling:
    def test_reports_all_compatible_parents(self, rdm_operator_9term):
        mapping = group_qwc(rdm_operator_9term, seed=0)
        parents = compatible_parents(word_from_string("Z1"), mapping)
        assert word_from_string("X0 Z1") in parents
        assert word_from_string("Z0 Z1") in parents

    def test_pooled_variance_not_worse_than_single_parent(self):
        # synthetic data: Z1 measurable from two parents of a product state
        circuit = Circuit([Gate("H", 0), Gate("RY", 1, parameter=0.7)])
        word = word_from_string("Z1")
        parent_a = word_from_string("X0 Z1")
        parent_b = word_from_string("Z0 Z1")
        n_shots = 400
        single, pooled = [], []
        for repeat in range(300):
            freqs_a, _ = simulate(circuit, BackendConfig(n_shots=n_shots, seed=2 * repeat))
            freqs_b, _ = simulate(circuit, BackendConfig(n_shots=n_shots, seed=2 * repeat + 1))
            data = {parent_a: (freqs_a, n_shots), parent_b: (freqs_b, n_shots)}
            single.append(pooled_expectation(word, data, parents=[parent_a]))
            pooled.append(pooled_expectation(word, data))
        assert np.var(pooled) <= np.var(single) * 1.05

    def test_incompatible_parent_rejected(self):
        data = {word_from_string("X0"): ({"0": 1.0}, 10)}
        with pytest.raises(ValidationError):
            pooled_expectation(word_from_string("Z0"), data, parents=[word_from_string("X0")])

    def test_no_parent_data_rejected(self):
        with pytest.raises(ValidationError):
            pooled_expectation(word_from_string("Z0"), {})

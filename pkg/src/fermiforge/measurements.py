"""Measurement-basis grouping and per-term shot budgeting.

Grouping is a greedy clique cover of the qubit-wise-commutativity graph:
terms are visited in a seed-shuffled order and assigned to the earliest
existing group they are compatible with, so the cover is deterministic
for a fixed seed while different seeds can explore different minimum
covers.
"""

from __future__ import annotations

import math
from typing import Dict, List, Optional, Tuple

import numpy as np

from .errors import ValidationError
from .operators import PauliWord, QubitOperator, qwc_compatible
from .simulator import Histogram, expectation_from_frequencies_oneterm

MeasurementMap = Dict[PauliWord, QubitOperator]
ShotPlan = Dict[PauliWord, Dict[PauliWord, int]]


def group_parent(words: List[PauliWord]) -> PauliWord:
    """Qubit-wise union of mutually QWC-compatible words."""
    axes: Dict[int, str] = {}
    for word in words:
        for qubit, axis in word:
            axes[qubit] = axis
    return tuple(sorted(axes.items()))


def group_qwc(op: QubitOperator, seed: int = 0) -> MeasurementMap:
    """Greedy clique cover of the QWC-compatibility graph.

    Identity terms are excluded.  The parent basis of each group is the
    qubit-wise union of its members; measuring in the parent basis
    determines every member's expectation value.

    Returns:
        Map parent word -> QubitOperator holding the grouped terms with
        their original coefficients; empty map for an operator with no
        non-identity terms.
    """
    words = sorted(word for word in op.terms if word)
    if not words:
        return {}
    order = np.random.default_rng(seed).permutation(len(words))
    groups: List[List[PauliWord]] = []
    for position in order:
        word = words[int(position)]
        for group in groups:
            if all(qwc_compatible(word, member) for member in group):
                group.append(word)
                break
        else:
            groups.append([word])
    result: MeasurementMap = {}
    for group in groups:
        sub = QubitOperator.zero()
        for word in group:
            sub.terms[word] = op.terms[word]
        result[group_parent(group)] = sub
    return result


def get_measurement_estimate(op: QubitOperator, digits: int = 2) -> Dict[PauliWord, int]:
    """Per-term shot counts for ``digits`` decimal digits of accuracy.

    The standard deviation of a Pauli-word estimate scales as
    1/sqrt(n_shots); weighting by the magnitude of the (real part of the)
    coefficient and targeting a standard error of 10**-(digits+1) gives

        n_shots = ceil((|Re c| * 10**(digits+1))**2)

    with a minimum of one shot for any nonzero coefficient and zero for
    the identity term.
    """
    if digits < 0:
        raise ValidationError("digits must be >= 0")
    scale = 10.0 ** (digits + 1)
    estimate: Dict[PauliWord, int] = {}
    for word, coefficient in op:
        if not word or coefficient == 0:
            estimate[word] = 0
            continue
        shots = math.ceil((abs(coefficient.real) * scale) ** 2)
        estimate[word] = max(1, shots)
    return estimate


def plan_measurements(op: QubitOperator, seed: int = 0, digits: int = 2) -> ShotPlan:
    """Group by QWC, then budget shots per term within each group."""
    return {
        parent: get_measurement_estimate(sub, digits=digits)
        for parent, sub in group_qwc(op, seed=seed).items()
    }


def total_shots(plan: ShotPlan) -> int:
    """Shots needed to execute a plan: one circuit per parent basis, run for
    its most demanding member."""
    return sum(max(member.values(), default=0) for member in plan.values())


def compatible_parents(term: PauliWord, measurement_map: MeasurementMap) -> List[PauliWord]:
    """All parent bases whose data determines ``term``'s expectation."""
    return [parent for parent in measurement_map if qwc_compatible(term, parent)]


def pooled_expectation(term: PauliWord,
                       parent_data: Dict[PauliWord, Tuple[Histogram, int]],
                       parents: Optional[List[PauliWord]] = None) -> float:
    """Pool frequencies from several compatible parent bases.

    Each compatible parent contributes its estimate weighted by its shot
    count, equivalent to concatenating the underlying samples, so the
    pooled variance is at most the best single parent's.

    Args:
        term: Pauli word to estimate.
        parent_data: parent basis -> (histogram, n_shots).
        parents: optional explicit subset of parents to pool (defaults to
            every compatible parent present in ``parent_data``).
    """
    if parents is None:
        parents = [parent for parent in parent_data if qwc_compatible(term, parent)]
    else:
        for parent in parents:
            if not qwc_compatible(term, parent):
                raise ValidationError(f"parent {parent} is not QWC-compatible with {term}")
    if not parents:
        raise ValidationError(f"no compatible parent basis provides data for {term}")
    weighted = 0.0
    weight = 0
    for parent in parents:
        frequencies, n_shots = parent_data[parent]
        if n_shots <= 0:
            raise ValidationError("pooling requires positive shot counts")
        weighted += n_shots * expectation_from_frequencies_oneterm(term, frequencies)
        weight += n_shots
    return weighted / weight

"""Post-processing: RDM assembly, McWeeny purification, bootstrap statistics,
zero-noise extrapolation.

RDM conventions: spin-orbital tensors with one_rdm[p, q] = <a†_p a_q>
and two_rdm[p, q, r, s] = <a†_p a†_q a_r a_s>.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .circuits import Circuit
from .errors import ConvergenceError, ValidationError
from .mappings import MappingConfig, fermion_to_qubit_mapping
from .operators import FermionOperator, PauliWord
from .simulator import Histogram


@dataclass
class RDMPair:
    """1- and 2-RDM with the electron count they describe."""

    one_rdm: np.ndarray
    two_rdm: np.ndarray
    n_electrons: int


@dataclass
class BootstrapReport:
    mean: float
    stdev: float
    n_resamples: int
    seed: Optional[int]

    def to_dict(self) -> dict:
        return {"mean": self.mean, "stdev": self.stdev,
                "n_resamples": self.n_resamples, "seed": self.seed}


def _term_value(term, mapping: MappingConfig,
                expectations: Dict[PauliWord, float]) -> float:
    """Expectation of one unit-coefficient fermionic term.

    Maps the term, keeps words with nonzero real coefficient (imaginary
    ones cannot contribute to a real observable) and combines their
    measured expectations; the identity word is implicit with value 1.
    """
    image = fermion_to_qubit_mapping(FermionOperator(term, 1.0), mapping)
    value = 0.0
    for word, coefficient in image:
        if coefficient.real == 0:
            continue
        if not word:
            value += coefficient.real
            continue
        if word not in expectations:
            raise ValidationError(
                f"no measured expectation for Pauli word '{' '.join(a + str(q) for q, a in word)}'"
            )
        value += coefficient.real * expectations[word]
    return value


def rdms_from_expectations(fermion_op: FermionOperator, mapping: MappingConfig,
                           expectations: Dict[PauliWord, float]) -> RDMPair:
    """Assemble spin-orbital 1- and 2-RDMs from measured Pauli expectations.

    Every 1-body term ((p,1),(q,0)) of ``fermion_op`` fills one_rdm[p, q],
    every 2-body term ((p,1),(q,1),(r,0),(s,0)) fills two_rdm[p, q, r, s];
    elements not directly provided by a term are completed from the exact
    fermionic identities (Hermitian mirror, and for the 2-RDM the
    antisymmetry orbit G[p,q,r,s] = -G[q,p,r,s] = -G[p,q,s,r]).  Constant
    terms are ignored.

    Raises:
        ValidationError: a required expectation is missing (named in the
            message) or a term is not in a†..a.. normal shape.
    """
    n = mapping.n_spinorbitals
    one_rdm = np.zeros((n, n), dtype=complex)
    two_rdm = np.zeros((n, n, n, n), dtype=complex)
    seen_one = set()
    seen_two = set()

    for term, _ in fermion_op:
        if len(term) == 0:
            continue
        actions = tuple(action for _, action in term)
        indices = tuple(index for index, _ in term)
        if actions == (1, 0):
            one_rdm[indices] = _term_value(term, mapping, expectations)
            seen_one.add(indices)
        elif actions == (1, 1, 0, 0):
            two_rdm[indices] = _term_value(term, mapping, expectations)
            seen_two.add(indices)
        else:
            raise ValidationError(
                f"term {term} is not a 1-body (p^ q) or 2-body (p^ q^ r s) element"
            )

    for p, q in list(seen_one):
        if (q, p) not in seen_one:
            one_rdm[q, p] = np.conjugate(one_rdm[p, q])

    filled = set(seen_two)
    for p, q, r, s in list(seen_two):
        value = two_rdm[p, q, r, s]
        orbit = [
            ((q, p, r, s), -value),
            ((p, q, s, r), -value),
            ((q, p, s, r), value),
            ((s, r, q, p), np.conjugate(value)),
            ((r, s, q, p), -np.conjugate(value)),
            ((s, r, p, q), -np.conjugate(value)),
            ((r, s, p, q), np.conjugate(value)),
        ]
        for index, element in orbit:
            if index not in filled:
                two_rdm[index] = element
                filled.add(index)

    n_electrons = mapping.n_electrons if mapping.n_electrons is not None else 0
    return RDMPair(one_rdm, two_rdm, n_electrons)


def mcweeny_iteration(matrix: np.ndarray, conv: float,
                      max_iterations: int = 100) -> Tuple[np.ndarray, List[float]]:
    """Iterate D <- 3 D^2 - 2 D^3 until max|D^2 - D| < conv.

    Returns the purified matrix and the residual history (one entry per
    check, so an already idempotent input reports a single entry and zero
    iterations were performed).

    Raises:
        ConvergenceError: residual still above ``conv`` after
            ``max_iterations`` sweeps.
    """
    D = np.array(matrix, dtype=complex)
    history: List[float] = []
    for sweep in range(max_iterations + 1):
        D2 = D @ D
        residual = float(np.max(np.abs(D2 - D)))
        history.append(residual)
        if residual < conv:
            return D, history
        if sweep < max_iterations:
            D = 3.0 * D2 - 2.0 * (D2 @ D)
    raise ConvergenceError(
        f"McWeeny iteration did not reach {conv} in {max_iterations} sweeps "
        f"(last residual {history[-1]:.3e})"
    )


def mcweeny_purify_2rdm(two_rdm: np.ndarray, conv: float = 1e-2,
                        n_electrons: int = 2) -> RDMPair:
    """Purify a two-electron 2-RDM to the dominant eigenvector.

    For exactly two electrons the 2-RDM carries the full state: the pair
    matrix D[(p,q), (s,r)] = two_rdm[p,q,r,s] / 2 is a projector for a
    pure state, so the idempotency-driving map 3D^2 - 2D^3 removes the
    mixedness noise introduces.  (Matricizing with columns (r,s) and no
    1/2 would give the dominant eigenvalue -2 and the iteration would
    diverge, hence this convention.)  The 1-RDM is re-contracted from the
    purified tensor: one_rdm[p, s] = sum_q two_rdm[p, q, q, s] / (N - 1).

    Raises:
        ValidationError: not a 2-electron system or tensor not 4-index square.
        ConvergenceError: iteration cap hit; residual reported.
    """
    if n_electrons != 2:
        raise ValidationError("McWeeny 2-RDM purification is limited to systems with two electrons")
    two_rdm = np.asarray(two_rdm, dtype=complex)
    if two_rdm.ndim != 4 or len(set(two_rdm.shape)) != 1:
        raise ValidationError(f"expected an (n, n, n, n) tensor, got shape {two_rdm.shape}")
    n = two_rdm.shape[0]

    pair_matrix = two_rdm.transpose(0, 1, 3, 2).reshape(n * n, n * n) / 2.0
    purified, _ = mcweeny_iteration(pair_matrix, conv)
    two_pure = 2.0 * purified.reshape(n, n, n, n).transpose(0, 1, 3, 2)
    one_pure = np.einsum("pqqs->ps", two_pure)  # divides by N-1 = 1
    return RDMPair(one_pure, two_pure, n_electrons)


def energy_from_rdms(fermion_op: FermionOperator, one_rdm: np.ndarray,
                     two_rdm: np.ndarray) -> float:
    """Contract a term-form Hamiltonian with spin-orbital RDMs.

    Constant terms add directly, ((p,1),(q,0)) terms contract with
    one_rdm[p, q] and ((p,1),(q,1),(r,0),(s,0)) terms with
    two_rdm[p, q, r, s].
    """
    energy = 0j
    for term, coefficient in fermion_op:
        if len(term) == 0:
            energy += coefficient
            continue
        actions = tuple(action for _, action in term)
        indices = tuple(index for index, _ in term)
        if actions == (1, 0):
            energy += coefficient * one_rdm[indices]
        elif actions == (1, 1, 0, 0):
            energy += coefficient * two_rdm[indices]
        else:
            raise ValidationError(f"term {term} is not in a†..a.. normal shape")
    return float(energy.real)


def resample_frequencies(frequencies: Histogram, n_shots: int,
                         rng: Union[np.random.Generator, int, None] = None) -> Histogram:
    """Draw ``n_shots`` outcomes i.i.d. from a normalized histogram.

    Returns the empirical histogram of the resample (values are multiples
    of 1/n_shots and sum to one).
    """
    if n_shots < 1:
        raise ValidationError("n_shots must be >= 1")
    total = sum(frequencies.values())
    if abs(total - 1.0) > 1e-9:
        raise ValidationError(f"histogram frequencies sum to {total}, expected 1")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    keys = sorted(frequencies)
    probabilities = np.array([frequencies[k] for k in keys], dtype=float)
    counts = rng.multinomial(n_shots, probabilities / probabilities.sum())
    return {k: c / n_shots for k, c in zip(keys, counts) if c}


def series_stats(series: Sequence[float]) -> Tuple[float, float]:
    """(mean, sample standard deviation with the N-1 denominator)."""
    if len(series) == 0:
        raise ValidationError("cannot take statistics of an empty series")
    if len(series) < 2:
        raise ValidationError("the sample standard deviation needs at least two values")
    data = np.asarray(series, dtype=float)
    return float(np.mean(data)), float(np.std(data, ddof=1))


def bootstrap_series(freq_by_term: Dict[PauliWord, Histogram], n_shots: int,
                     n_resamples: int,
                     statistic: Callable[[Dict[PauliWord, float]], float],
                     seed: Optional[int] = None) -> List[float]:
    """Resample every histogram, re-derive expectations, apply ``statistic``.

    Each resample uses its own derived RNG stream (seed, resample index),
    so resamples are independent and the whole series is reproducible.
    """
    from .simulator import expectation_from_frequencies_oneterm

    series = []
    for index in range(n_resamples):
        rng = np.random.default_rng(seed if seed is None else [seed, index])
        expectations = {
            term: expectation_from_frequencies_oneterm(
                term, resample_frequencies(freqs, n_shots, rng))
            for term, freqs in sorted(freq_by_term.items())
        }
        series.append(statistic(expectations))
    return series


def bootstrap_statistics(freq_by_term: Dict[PauliWord, Histogram], n_shots: int,
                         n_resamples: int,
                         statistic: Callable[[Dict[PauliWord, float]], float],
                         seed: Optional[int] = None) -> BootstrapReport:
    """Bootstrap mean and standard deviation of a derived quantity."""
    series = bootstrap_series(freq_by_term, n_shots, n_resamples, statistic, seed)
    mean, stdev = series_stats(series)
    return BootstrapReport(mean, stdev, n_resamples, seed)


def rdm_energy_statistic(fermion_op: FermionOperator, mapping: MappingConfig,
                         purify: bool = False,
                         conv: float = 1e-2) -> Callable[[Dict[PauliWord, float]], float]:
    """Statistic for the RDM bootstrap pipeline: expectations -> RDMs
    (optionally McWeeny-purified) -> total energy."""

    def statistic(expectations: Dict[PauliWord, float]) -> float:
        rdms = rdms_from_expectations(fermion_op, mapping, expectations)
        if purify:
            rdms = mcweeny_purify_2rdm(rdms.two_rdm, conv=conv, n_electrons=rdms.n_electrons)
        return energy_from_rdms(fermion_op, rdms.one_rdm, rdms.two_rdm)

    return statistic


def richardson_extrapolate(scale_values: Sequence[Tuple[float, float]]) -> float:
    """Polynomial extrapolation of (noise scale, value) pairs to scale 0.

    Fits the unique degree (m-1) polynomial through the m pairs and
    evaluates it at zero; exact for values that are polynomial in the
    noise scale.
    """
    if len(scale_values) < 2:
        raise ValidationError("extrapolation needs at least two (scale, value) pairs")
    scales = np.array([s for s, _ in scale_values], dtype=float)
    values = np.array([v for _, v in scale_values], dtype=float)
    if len(set(scales.tolist())) != len(scales):
        raise ValidationError("noise scales must be distinct")
    coefficients = np.linalg.solve(np.vander(scales, increasing=True), values)
    return float(coefficients[0])


def fold_circuit_gates(circuit: Circuit, scale: int) -> Circuit:
    """Local gate folding G -> G (G† G)**k for odd noise scale 2k+1.

    MEASURE gates are copied unfolded.
    """
    if scale < 1 or scale % 2 == 0:
        raise ValidationError("the folding scale must be an odd positive integer")
    folds = (scale - 1) // 2
    result = Circuit(n_qubits=circuit.declared_width)
    for gate in circuit.gates:
        result.add_gate(gate.copy())
        if gate.name == "MEASURE":
            continue
        for _ in range(folds):
            result.add_gate(gate.inverse())
            result.add_gate(gate.copy())
    return result

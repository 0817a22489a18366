"""Shot-based and exact statevector simulation.

Conventions (also reported by :func:`backend_info`):

* Statevector: complex amplitudes of length 2**width, basis-state index
  bit k = qubit k.
* Histogram: sparse ``{bitstring: frequency}`` map; bitstring character i
  is the observed basis state of qubit i (least-significant qubit first,
  read left to right).
* Noise: stochastic Pauli trajectories.  A k-qubit gate carrying a
  depolarizing channel of probability p is followed, with probability p,
  by one of the 4**k - 1 non-identity Pauli words on its qubit set, drawn
  uniformly.  The implied one-qubit <Z> decay factor is (1 - 4p/3).
* Sampling: inverse-CDF over the nonzero-probability support driven by a
  seeded NumPy PCG64 generator, so shot-mode results are reproducible
  bit-exactly for a fixed seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .circuits import NATIVE_GATES, Circuit, Gate
from .errors import SimulationError, UnsupportedGateError, ValidationError
from .kernels import HAVE_COMPILED, get_kernels
from .operators import PauliWord, QubitOperator, validate_word

Histogram = Dict[str, float]

#: Probabilities below this are culled from exact-mode histograms.
EXACT_CULL = 1e-10

_INV_SQRT2 = 1.0 / math.sqrt(2.0)
_T_PHASE = complex(math.cos(math.pi / 4), math.sin(math.pi / 4))

_FIXED_1Q = {
    "H": (_INV_SQRT2, _INV_SQRT2, _INV_SQRT2, -_INV_SQRT2),
    "X": (0, 1, 1, 0),
    "Y": (0, -1j, 1j, 0),
    "Z": (1, 0, 0, -1),
    "S": (1, 0, 0, 1j),
    "SDAG": (1, 0, 0, -1j),
    "T": (1, 0, 0, _T_PHASE),
    "TDAG": (1, 0, 0, _T_PHASE.conjugate()),
}


def _rotation_1q(name: str, theta: float):
    half = theta / 2.0
    c, s = math.cos(half), math.sin(half)
    if name == "RX":
        return (c, -1j * s, -1j * s, c)
    if name == "RY":
        return (c, -s, s, c)
    if name in ("RZ", "CRZ"):
        return (complex(c, -s), 0, 0, complex(c, s))
    if name == "PHASE":
        return (1, 0, 0, complex(math.cos(theta), math.sin(theta)))
    raise UnsupportedGateError(f"no matrix rule for gate {name}")


def one_qubit_matrix(gate: Gate):
    """(m00, m01, m10, m11) for any native single-target gate."""
    if gate.name in _FIXED_1Q:
        return _FIXED_1Q[gate.name]
    if gate.name in ("CNOT",):
        return _FIXED_1Q["X"]
    if gate.name in ("CZ",):
        return _FIXED_1Q["Z"]
    if gate.name in ("RX", "RY", "RZ", "PHASE", "CRZ"):
        if gate.is_symbolic or gate.parameter is None:
            raise SimulationError(
                f"gate {gate.name} has unbound parameter {gate.parameter!r}; bind it first"
            )
        return _rotation_1q(gate.name, float(gate.parameter))
    raise UnsupportedGateError(f"gate {gate.name} is not supported by the statevector backend")


class NoiseModel:
    """Per-gate noise channels; currently the depolarizing channel only."""

    def __init__(self):
        self.gate_errors: Dict[str, List[Tuple[str, float]]] = {}

    def add_quantum_error(self, gate_name: str, kind: str, probability: float) -> None:
        if kind != "depol":
            raise ValidationError(f"unknown noise channel {kind!r} (supported: 'depol')")
        if not 0.0 <= probability <= 1.0:
            raise ValidationError(f"noise probability must be in [0, 1], got {probability}")
        self.gate_errors.setdefault(gate_name.upper(), []).append((kind, float(probability)))

    def channels_for(self, gate_name: str) -> List[Tuple[str, float]]:
        return self.gate_errors.get(gate_name.upper(), [])

    def __bool__(self) -> bool:
        return bool(self.gate_errors)

    def to_dict(self) -> dict:
        return {name: [[kind, p] for kind, p in chans] for name, chans in self.gate_errors.items()}

    @classmethod
    def from_dict(cls, data: dict) -> "NoiseModel":
        model = cls()
        for name, channels in data.items():
            for kind, probability in channels:
                model.add_quantum_error(name, kind, probability)
        return model


@dataclass
class BackendConfig:
    """Simulation parameters.

    ``n_shots=None`` selects exact mode.  ``target`` picks the kernel
    implementation ("auto", "compiled" or "python").  A noise model
    requires shots (trajectory sampling).
    """

    target: str = "auto"
    n_shots: Optional[int] = None
    noise_model: Optional[NoiseModel] = None
    seed: Optional[int] = None
    width_cap_exact: int = 24
    width_cap_noisy: int = 20

    def __post_init__(self):
        if self.n_shots is not None and self.n_shots <= 0:
            raise ValidationError("n_shots must be a positive integer (or None for exact mode)")
        if self.noise_model is not None and self.n_shots is None:
            raise ValidationError("a noise model requires n_shots to be set")


def bitstring_of(index: int, width: int) -> str:
    """Little-endian key: character i is the basis state of qubit i."""
    return "".join("1" if (index >> k) & 1 else "0" for k in range(width))


def index_of(bitstring: str) -> int:
    index = 0
    for k, char in enumerate(bitstring):
        if char == "1":
            index |= 1 << k
    return index


def zero_state(width: int) -> np.ndarray:
    state = np.zeros(1 << width, dtype=np.complex128)
    state[0] = 1.0
    return state


def _check_statevector(state: np.ndarray, width: int) -> np.ndarray:
    state = np.asarray(state, dtype=np.complex128).reshape(-1).copy()
    if len(state) != (1 << width):
        raise ValidationError(
            f"initial state has length {len(state)}, expected {1 << width} for width {width}"
        )
    norm = np.linalg.norm(state)
    if abs(norm - 1.0) > 1e-10:
        raise ValidationError(f"initial state is not normalized (|norm - 1| = {abs(norm - 1):.2e})")
    return state


def _apply_gate(kern, state: np.ndarray, gate: Gate) -> None:
    name = gate.name
    if name == "SWAP":
        if gate.controls:
            raise UnsupportedGateError("controlled SWAP is not supported")
        kern.apply_swap(state, gate.targets[0], gate.targets[1])
        return
    if len(gate.targets) != 1:
        raise UnsupportedGateError(f"gate {name} with {len(gate.targets)} targets is not supported")
    if name in ("CNOT", "CZ", "CRZ") and not gate.controls:
        raise ValidationError(f"gate {name} requires at least one control qubit")
    matrix = one_qubit_matrix(gate)
    if gate.controls:
        mask = 0
        for control in gate.controls:
            mask |= 1 << control
        kern.apply_controlled_one_qubit(state, gate.targets[0], mask, *matrix)
    else:
        kern.apply_one_qubit(state, gate.targets[0], *matrix)


def apply_noise_trajectory(gate: Gate, noise_model: NoiseModel, rng: np.random.Generator) -> List[Gate]:
    """One stochastic unraveling of the gate's noise channels.

    Returns the gate followed by the sampled Pauli insertions: for each
    depol(p) channel, with probability p a uniformly random non-identity
    Pauli word on the gate's qubit set is appended.
    """
    gates = [gate]
    channels = noise_model.channels_for(gate.name)
    if not channels:
        return gates
    qubits = gate.qubits
    n_paulis = 4 ** len(qubits) - 1
    for kind, probability in channels:
        if probability == 0.0 or rng.random() >= probability:
            continue
        draw = int(rng.integers(1, n_paulis + 1))  # 1..4^k-1, base-4 digits, 0 = identity
        for qubit in qubits:
            digit = draw % 4
            draw //= 4
            if digit:
                gates.append(Gate(("I", "X", "Y", "Z")[digit], qubit))
    return gates


def _validate_circuit(circuit: Circuit, allow_measure: bool) -> None:
    for gate in circuit.gates:
        if gate.name not in NATIVE_GATES:
            raise UnsupportedGateError(f"gate {gate.name} is not in the native gate set")
        if gate.is_symbolic:
            raise SimulationError(
                f"cannot simulate: gate {gate.name} has unbound parameter {gate.parameter!r}"
            )
        if gate.name == "MEASURE" and not allow_measure:
            raise SimulationError("MEASURE requires a shot-based backend (set n_shots)")


def _run_pure(kern, circuit: Circuit, state: np.ndarray) -> np.ndarray:
    for gate in circuit.gates:
        _apply_gate(kern, state, gate)
    return state


def _run_trajectory(kern, circuit: Circuit, state: np.ndarray,
                    noise_model: Optional[NoiseModel], rng: np.random.Generator) -> np.ndarray:
    for gate in circuit.gates:
        if gate.name == "MEASURE":
            qubit = gate.targets[0]
            p_one = kern.prob_of_one(state, qubit)
            outcome = 1 if rng.random() < p_one else 0
            kern.project_qubit(state, qubit, outcome, p_one if outcome else 1.0 - p_one)
            continue
        if noise_model is not None:
            for realized in apply_noise_trajectory(gate, noise_model, rng):
                _apply_gate(kern, state, realized)
        else:
            _apply_gate(kern, state, gate)
    return state


def _histogram_from_probs(probs: np.ndarray, width: int, cull: float = EXACT_CULL) -> Histogram:
    (support,) = np.nonzero(probs > cull)
    return {bitstring_of(int(i), width): float(probs[i]) for i in support}


def _sample_counts(probs: np.ndarray, n_shots: int, rng: np.random.Generator) -> Dict[int, int]:
    (support,) = np.nonzero(probs > 0)
    cdf = np.cumsum(probs[support])
    cdf[-1] = max(cdf[-1], 1.0)  # guard against rounding below the final draw
    draws = np.searchsorted(cdf, rng.random(n_shots), side="right")
    counts: Dict[int, int] = {}
    for position, count in zip(*np.unique(draws, return_counts=True)):
        counts[int(support[position])] = int(count)
    return counts


def simulate(circuit: Circuit, config: Optional[BackendConfig] = None,
             initial_state: Optional[np.ndarray] = None,
             return_statevector: bool = False) -> Tuple[Histogram, Optional[np.ndarray]]:
    """Simulate a circuit and return ``(histogram, statevector or None)``.

    Exact mode (``n_shots=None``) returns the squared-amplitude histogram
    (zero-probability keys omitted); shot mode returns empirical
    frequencies from ``n_shots`` samples.  The statevector is returned
    only when requested and the simulation is noiseless.  ``initial_state``
    replaces the all-zeros start, e.g. to avoid re-simulating a known
    prefix.
    """
    config = config or BackendConfig()
    width = circuit.width
    if width == 0:
        raise ValidationError("cannot simulate a circuit acting on no qubits")

    noisy = config.noise_model is not None
    cap = config.width_cap_noisy if noisy else config.width_cap_exact
    if width > cap:
        raise SimulationError(f"circuit width {width} exceeds the cap of {cap} qubits")
    if noisy and return_statevector:
        raise SimulationError("statevector output is not available under noise")

    _validate_circuit(circuit, allow_measure=config.n_shots is not None)
    kern = get_kernels(config.target)
    rng = np.random.default_rng(config.seed)

    def fresh_state() -> np.ndarray:
        if initial_state is not None:
            return _check_statevector(initial_state, width)
        return zero_state(width)

    has_measure = any(g.name == "MEASURE" for g in circuit.gates)
    noisy_gates = noisy and any(config.noise_model.channels_for(g.name) for g in circuit.gates)

    if config.n_shots is None:
        state = _run_pure(kern, circuit, fresh_state())
        histogram = _histogram_from_probs(np.abs(state) ** 2, width)
        return histogram, (state if return_statevector else None)

    if not noisy_gates and not has_measure:
        # deterministic final state: simulate once and sample
        state = _run_pure(kern, circuit, fresh_state())
        counts = _sample_counts(np.abs(state) ** 2, config.n_shots, rng)
        histogram = {bitstring_of(i, width): c / config.n_shots for i, c in counts.items()}
        return histogram, (state if return_statevector and not noisy else None)

    counts: Dict[int, int] = {}
    for _ in range(config.n_shots):
        state = _run_trajectory(kern, circuit, fresh_state(), config.noise_model, rng)
        probs = np.abs(state) ** 2
        (support,) = np.nonzero(probs > 0)
        cdf = np.cumsum(probs[support])
        cdf[-1] = max(cdf[-1], 1.0)
        outcome = int(support[np.searchsorted(cdf, rng.random(), side="right")])
        counts[outcome] = counts.get(outcome, 0) + 1
    histogram = {bitstring_of(i, width): c / config.n_shots for i, c in counts.items()}
    return histogram, None


def word_masks(word: PauliWord) -> Tuple[int, int, int]:
    """(x_mask, y_mask, z_mask) bit masks of a Pauli word."""
    x = y = z = 0
    for qubit, axis in word:
        bit = 1 << qubit
        if axis == "X":
            x |= bit
        elif axis == "Y":
            y |= bit
        else:
            z |= bit
    return x, y, z


def statevector_expectation(op: QubitOperator, state: np.ndarray,
                            target: str = "auto") -> complex:
    """<psi| op |psi> evaluated term by term on a statevector."""
    kern = get_kernels(target)
    width = int(len(state) - 1).bit_length()
    total = 0j
    for word, coeff in op:
        if word and word[-1][0] >= width:
            raise ValidationError(
                f"operator acts on qubit {word[-1][0]} but the state has {width} qubits"
            )
        if not word:
            total += coeff
            continue
        total += coeff * kern.expect_pauli(state, *word_masks(word))
    return total


def append_measurement_basis(circuit: Circuit, basis: PauliWord) -> Circuit:
    """Append the basis rotations mapping ``basis`` eigenstates to Z readout.

    H on X-axis qubits, RX(pi/2) on Y-axis qubits, nothing on Z-axis
    qubits.  Returns a new circuit.
    """
    validate_word(basis)
    rotated = circuit.copy()
    for qubit, axis in basis:
        if axis == "X":
            rotated.add_gate(Gate("H", qubit))
        elif axis == "Y":
            rotated.add_gate(Gate("RX", qubit, parameter=math.pi / 2))
    return rotated


def expectation_from_frequencies_oneterm(term: PauliWord, frequencies: Histogram) -> float:
    """Expectation of a single Pauli word from frequencies measured in its basis.

    Sum over bitstrings of frequency * (-1)**(number of '1' characters at
    the term's qubit positions).  The caller guarantees the circuit was
    measured in the term's basis.
    """
    validate_word(term)
    if not term:
        return 1.0
    positions = [qubit for qubit, _ in term]
    needed = positions[-1] + 1
    value = 0.0
    for bitstring, frequency in frequencies.items():
        if len(bitstring) < needed:
            raise ValidationError(
                f"histogram key {bitstring!r} is shorter than the term's support ({needed} qubits)"
            )
        parity = sum(1 for q in positions if bitstring[q] == "1") % 2
        value += frequency * (1.0 - 2.0 * parity)
    return value


def _derived_seed(seed: Optional[int], stage: str) -> Optional[List[int]]:
    """Expand one root seed into a named per-stage stream."""
    if seed is None:
        return None
    import zlib

    return [int(seed), zlib.crc32(stage.encode("utf-8"))]


def get_expectation_value(op: QubitOperator, circuit: Circuit,
                          config: Optional[BackendConfig] = None) -> float:
    """<psi| op |psi> for the state prepared by ``circuit``.

    Exact mode computes the expectation directly from the statevector.
    Shot mode measures each non-identity term in its own basis (via
    :func:`append_measurement_basis`) with per-term derived seeds and
    combines the frequency estimates with the real parts of the
    coefficients.
    """
    config = config or BackendConfig()
    if not op.is_hermitian(1e-8):
        raise ValidationError("expectation values require a Hermitian operator")

    if config.n_shots is None:
        _validate_circuit(circuit, allow_measure=False)
        width = max(circuit.width, op.n_qubits)
        kern = get_kernels(config.target)
        state = zero_state(width)
        _run_pure(kern, circuit, state)
        value = statevector_expectation(op, state, target=config.target)
        if abs(value.imag) > 1e-8:
            raise SimulationError(
                f"expectation of a Hermitian operator came out complex ({value.imag:.2e}); "
                "operator or state is inconsistent"
            )
        return float(value.real)

    total = 0.0
    for word, coeff in sorted(op, key=lambda item: item[0]):
        if not word:
            total += coeff.real
            continue
        stage_cfg = BackendConfig(
            target=config.target,
            n_shots=config.n_shots,
            noise_model=config.noise_model,
            seed=None,
            width_cap_exact=config.width_cap_exact,
            width_cap_noisy=config.width_cap_noisy,
        )
        stage_cfg.seed = _derived_seed(config.seed, f"expval:{word}")
        frequencies, _ = simulate(append_measurement_basis(circuit, word), stage_cfg)
        total += coeff.real * expectation_from_frequencies_oneterm(word, frequencies)
    return total


def backend_info(target: str = "auto") -> dict:
    """Conventions and capabilities of the bundled backend."""
    from .kernels import active_implementation

    return {
        "statevector_order": "basis-state index bit k = qubit k (little-endian)",
        "histogram_order": "bitstring character i = qubit i (least-significant first)",
        "supported_gates": sorted(NATIVE_GATES),
        "width_cap_exact": BackendConfig().width_cap_exact,
        "width_cap_noisy": BackendConfig().width_cap_noisy,
        "noise_channels": ["depol"],
        "prng": "numpy PCG64 (seeded)",
        "kernels": active_implementation(target),
        "compiled_kernels_available": HAVE_COMPILED,
        "exact_histogram_cull": EXACT_CULL,
    }

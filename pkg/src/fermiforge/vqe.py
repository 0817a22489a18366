"""VQE solver with a build/simulate/get_resources lifecycle.

Ansatz families:

* HEA: layered single-qubit rotations with a linear CNOT entangler.
* QCC: exponentiated Pauli-word generators exp(-i tau_k P_k / 2) acting on
  the mean-field reference, generators screened by the magnitude of the
  energy derivative dE/dtau_k = (i/2) <ref| [P_k, H] |ref> evaluated at
  tau = 0.  An optional mean-field Bloch layer RZ(phi) RY(theta) per qubit
  can be co-optimized (off by default; the default mean field is the
  Hartree-Fock bitstring).
* CUSTOM: any user circuit with variational-tagged gates.

Generator application order is list order: the first generator's
exponential acts on the reference first.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import optimize as _sciopt

from .circuits import Circuit, Gate
from .errors import LifecycleError, ValidationError
from .mappings import MappingConfig, fermion_to_qubit_mapping, hartree_fock_bitstring
from .operators import (FermionOperator, PauliWord, QubitOperator,
                        multiply_words, words_commute)
from .simulator import BackendConfig, get_expectation_value

RESOURCE_KEYS = (
    "qubit_hamiltonian_terms",
    "circuit_width",
    "circuit_gates",
    "circuit_2qubit_gates",
    "circuit_var_gates",
    "vqe_variational_parameters",
)

_GRADIENT_GROUP_TOL = 1e-10
_CANDIDATE_POOL_CAP = 1_000_000


@dataclass
class HEAOptions:
    n_layers: int = 2
    rotation_axes: Tuple[str, ...] = ("RY", "RZ")
    entangler: str = "linear"  # CNOT chain; "linear_cz" keeps basis states fixed

    def __post_init__(self):
        if self.n_layers < 1:
            raise ValidationError("HEA needs at least one layer")
        for axis in self.rotation_axes:
            if axis.upper() not in ("RX", "RY", "RZ"):
                raise ValidationError(f"unknown HEA rotation axis {axis!r}")
        self.rotation_axes = tuple(a.upper() for a in self.rotation_axes)
        if self.entangler not in ("linear", "linear_cz"):
            raise ValidationError(f"unknown entangler pattern {self.entangler!r}")


@dataclass
class QCCOptions:
    tau_guess: float = 1e-2
    deqcc_dtau_thresh: float = 1e-3
    max_qcc_gens: Optional[int] = None
    bloch_layer: bool = False

    def __post_init__(self):
        if self.deqcc_dtau_thresh <= 0:
            raise ValidationError("the QCC gradient threshold must be > 0")
        if self.max_qcc_gens is not None and self.max_qcc_gens < 1:
            raise ValidationError("max_qcc_gens must be >= 1 when set")


@dataclass
class AnsatzSpec:
    kind: str
    hea: HEAOptions = field(default_factory=HEAOptions)
    qcc: QCCOptions = field(default_factory=QCCOptions)
    custom_circuit: Optional[Circuit] = None

    def __post_init__(self):
        self.kind = self.kind.upper()
        if self.kind not in ("HEA", "QCC", "CUSTOM"):
            raise ValidationError(f"unknown ansatz kind {self.kind!r}")
        if self.kind == "CUSTOM" and self.custom_circuit is None:
            raise ValidationError("a CUSTOM ansatz needs a circuit")


@dataclass
class OptimizerSettings:
    """Classical minimizer settings.

    The default is a derivative-free simplex method restarted from its
    end point until the energy stops improving (``restarts`` cap), which
    recovers from the premature simplex collapse plain Nelder-Mead is
    prone to.  ``spsa`` is a simultaneous-perturbation option for
    shot-based backends.
    """

    method: str = "nelder-mead"
    tolerance: float = 1e-7
    max_evals: int = 5000
    seed: Optional[int] = None
    restarts: int = 5
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        self.method = self.method.lower()
        if self.method not in ("nelder-mead", "spsa"):
            raise ValidationError(f"unknown optimizer {self.method!r}")
        if self.restarts < 1:
            raise ValidationError("restarts must be >= 1")


@dataclass
class VQEConfig:
    """Problem definition: Hamiltonian, ansatz, reference, optimizer, backend.

    Provide either ``qubit_hamiltonian`` or ``fermion_operator`` plus
    ``mapping``.  ``initial_var_params`` is "zeros", "random" (uniform over
    [-tau_guess, +tau_guess] for QCC, [-0.01, 0.01] otherwise, seeded) or
    an explicit list.
    """

    qubit_hamiltonian: Optional[QubitOperator] = None
    fermion_operator: Optional[FermionOperator] = None
    mapping: Optional[MappingConfig] = None
    ansatz: AnsatzSpec = field(default_factory=lambda: AnsatzSpec("HEA"))
    reference_bitstring: Optional[str] = None
    initial_var_params: Union[str, Sequence[float]] = "zeros"
    optimizer: OptimizerSettings = field(default_factory=OptimizerSettings)
    backend: BackendConfig = field(default_factory=BackendConfig)

    def __post_init__(self):
        if self.qubit_hamiltonian is None and self.fermion_operator is None:
            raise ValidationError("a qubit Hamiltonian or a fermionic operator is required")
        if self.qubit_hamiltonian is not None and self.fermion_operator is not None:
            raise ValidationError("give either a qubit Hamiltonian or a fermionic operator, not both")
        if self.fermion_operator is not None and self.mapping is None:
            raise ValidationError("a fermionic operator requires a MappingConfig")


@dataclass
class QCCGeneratorSet:
    """Screened generators with their gradients and variational parameters."""

    generators: List[PauliWord]
    gradients: List[float]
    taus: np.ndarray
    bloch_layer: bool = False

    @property
    def n_generators(self) -> int:
        return len(self.generators)


def basis_state_expectation(op: QubitOperator, bits: str) -> float:
    """<b| op |b> for a computational basis state (little-endian bitstring).

    Only Z/identity words contribute: each gives (-1)**(occupied Z sites).
    """
    total = 0j
    for word, coefficient in op:
        sign = 1.0
        diagonal = True
        for qubit, axis in word:
            if axis != "Z":
                diagonal = False
                break
            if qubit < len(bits) and bits[qubit] == "1":
                sign = -sign
        if diagonal:
            total += coefficient * sign
    return float(total.real)


def _candidate_generators(hamiltonian: QubitOperator) -> List[PauliWord]:
    """Odd-Y Pauli words on every qubit subset appearing as a term support."""
    supports = sorted(
        {tuple(q for q, _ in word) for word in hamiltonian.terms if word}
    )
    pool_size = sum(3 ** len(s) for s in supports)
    if pool_size > _CANDIDATE_POOL_CAP:
        raise ValidationError(
            f"QCC candidate pool would have ~{pool_size} words; "
            "restrict the Hamiltonian supports or supply a CUSTOM ansatz"
        )
    candidates = []
    for support in supports:
        for axes in itertools.product("XYZ", repeat=len(support)):
            if axes.count("Y") % 2 == 1:
                candidates.append(tuple(zip(support, axes)))
    return candidates


def qcc_gradient(generator: PauliWord, hamiltonian: QubitOperator, reference_bits: str) -> float:
    """dE/dtau at tau = 0: (i/2) <ref| [P, H] |ref> on a basis-state reference.

    Uses [P, W] = 2 P W for anticommuting words (zero otherwise) and the
    fact that only Z/identity products have nonzero basis-state
    expectation.
    """
    total = 0j
    for word, coefficient in hamiltonian:
        if words_commute(generator, word):
            continue
        phase, product = multiply_words(generator, word)
        if any(axis != "Z" for _, axis in product):
            continue
        sign = 1.0
        for qubit, _ in product:
            if qubit < len(reference_bits) and reference_bits[qubit] == "1":
                sign = -sign
        total += coefficient * phase * sign
    gradient = 1j * total  # (i/2) * 2
    if abs(gradient.imag) > 1e-9:
        raise ValidationError("screening gradient came out complex; Hamiltonian is not Hermitian")
    return float(gradient.real)


def qcc_screen_generators(hamiltonian: QubitOperator, reference_bits: str,
                          threshold: float,
                          max_gens: Optional[int] = None) -> QCCGeneratorSet:
    """Rank candidate generators by |dE/dtau| and retain per policy.

    Candidates with |gradient| >= threshold are sorted by descending
    magnitude with lexicographic tie-breaking.  Candidates of identical
    magnitude (within 1e-10) form one candidate set; without ``max_gens``
    one representative per set is kept, otherwise the top ``max_gens``
    candidates are kept.  May return an empty set.
    """
    scored = []
    for word in _candidate_generators(hamiltonian):
        gradient = qcc_gradient(word, hamiltonian, reference_bits)
        if abs(gradient) >= threshold:
            scored.append((word, gradient))
    scored.sort(key=lambda item: (-abs(item[1]), item[0]))

    if max_gens is None:
        kept: List[Tuple[PauliWord, float]] = []
        current_magnitude = None
        for word, gradient in scored:
            if current_magnitude is None or abs(abs(gradient) - current_magnitude) > _GRADIENT_GROUP_TOL:
                kept.append((word, gradient))
                current_magnitude = abs(gradient)
        scored = kept
    else:
        scored = scored[:max_gens]

    generators = [word for word, _ in scored]
    gradients = [gradient for _, gradient in scored]
    return QCCGeneratorSet(generators, gradients, np.zeros(len(generators)))


def reference_circuit(bits: str) -> Circuit:
    """X gates on the occupied ('1') qubits of a little-endian bitstring."""
    circuit = Circuit(n_qubits=len(bits))
    for qubit, bit in enumerate(bits):
        if bit == "1":
            circuit.add_gate(Gate("X", qubit))
    return circuit


def pauli_exponential_circuit(word: PauliWord, angle: Union[float, str],
                              variational: bool = True) -> Circuit:
    """Standard template for exp(-i angle P / 2).

    Basis rotations (H for X, RX(pi/2) for Y) map the word to a Z string;
    a CNOT ladder accumulates the parity, RZ(angle) applies the phase, and
    the ladder and rotations are undone.
    """
    if not word:
        raise ValidationError("cannot exponentiate the identity word")
    circuit = Circuit()
    qubits = [qubit for qubit, _ in word]
    for qubit, axis in word:
        if axis == "X":
            circuit.add_gate(Gate("H", qubit))
        elif axis == "Y":
            circuit.add_gate(Gate("RX", qubit, parameter=math.pi / 2))
    for a, b in zip(qubits, qubits[1:]):
        circuit.add_gate(Gate("CNOT", b, control=a))
    circuit.add_gate(Gate("RZ", qubits[-1], parameter=angle, is_variational=variational))
    for a, b in reversed(list(zip(qubits, qubits[1:]))):
        circuit.add_gate(Gate("CNOT", b, control=a))
    for qubit, axis in word:
        if axis == "X":
            circuit.add_gate(Gate("H", qubit))
        elif axis == "Y":
            circuit.add_gate(Gate("RX", qubit, parameter=-math.pi / 2))
    return circuit


def qcc_build_circuit(generator_set: QCCGeneratorSet, reference_bits: str) -> Circuit:
    """Reference layer, optional Bloch layer, then one exponential per
    generator in list order (first generator acts on the state first)."""
    if generator_set.n_generators == 0:
        raise ValidationError("empty generator set: no QCC generator passed the screening")
    circuit = reference_circuit(reference_bits)
    if generator_set.bloch_layer:
        for qubit in range(len(reference_bits)):
            circuit.add_gate(Gate("RY", qubit, parameter=0.0, is_variational=True))
            circuit.add_gate(Gate("RZ", qubit, parameter=0.0, is_variational=True))
    for word, tau in zip(generator_set.generators, generator_set.taus):
        circuit = circuit + pauli_exponential_circuit(word, float(tau))
    return circuit


def hea_build_circuit(reference_bits: str, options: HEAOptions) -> Circuit:
    """Reference layer, then per layer [rotations, linear CNOT chain],
    closed by a final rotation layer."""
    n_qubits = len(reference_bits)
    circuit = reference_circuit(reference_bits)

    def rotation_layer():
        for axis in options.rotation_axes:
            for qubit in range(n_qubits):
                circuit.add_gate(Gate(axis, qubit, parameter=0.0, is_variational=True))

    entangler_gate = "CZ" if options.entangler == "linear_cz" else "CNOT"
    for _ in range(options.n_layers):
        rotation_layer()
        for qubit in range(n_qubits - 1):
            circuit.add_gate(Gate(entangler_gate, qubit + 1, control=qubit))
    rotation_layer()
    return circuit


def _spsa_minimize(fun, x0: np.ndarray, settings: OptimizerSettings):
    """Simultaneous-perturbation minimizer for shot-noisy objectives."""
    rng = np.random.default_rng(settings.seed)
    opts = settings.options
    a_step = float(opts.get("a", 0.2))
    c_step = float(opts.get("c", 0.1))
    alpha, gamma = 0.602, 0.101
    n_iterations = max(1, settings.max_evals // 2)
    stability = max(1.0, 0.1 * n_iterations)

    x = np.array(x0, dtype=float)
    for k in range(n_iterations):
        ak = a_step / (k + 1 + stability) ** alpha
        ck = c_step / (k + 1) ** gamma
        delta = rng.choice([-1.0, 1.0], size=len(x))
        f_plus = fun(x + ck * delta)
        f_minus = fun(x - ck * delta)
        x = x - ak * (f_plus - f_minus) / (2 * ck) * delta
    return x, fun(x)


class VQESolver:
    """Variational eigensolver over the configured ansatz and backend.

    Lifecycle: ``build()`` maps the Hamiltonian and constructs the ansatz
    circuit without simulating anything; ``get_resources()`` is available
    from then on; ``simulate()`` runs the classical minimization;
    ``energy_estimation(params)`` evaluates a single parameter vector.
    """

    def __init__(self, config: VQEConfig):
        self.config = config
        self.qubit_hamiltonian: Optional[QubitOperator] = None
        self.reference_bits: Optional[str] = None
        self.circuit: Optional[Circuit] = None
        self.generator_set: Optional[QCCGeneratorSet] = None
        self.initial_var_params: Optional[np.ndarray] = None
        self.optimal_var_params: Optional[np.ndarray] = None
        self.optimal_energy: Optional[float] = None
        self.energy_trace: List[float] = []
        self.converged: Optional[bool] = None
        self._built = False

    # -- lifecycle --------------------------------------------------------

    def build(self) -> "VQESolver":
        config = self.config
        if config.fermion_operator is not None:
            self.qubit_hamiltonian = fermion_to_qubit_mapping(config.fermion_operator,
                                                              config.mapping)
        else:
            self.qubit_hamiltonian = config.qubit_hamiltonian
        if not self.qubit_hamiltonian.is_hermitian(1e-8):
            raise ValidationError("the qubit Hamiltonian must be Hermitian")

        if config.reference_bitstring is not None:
            self.reference_bits = config.reference_bitstring
        elif config.mapping is not None and config.mapping.n_electrons is not None:
            self.reference_bits = hartree_fock_bitstring(config.mapping)
        else:
            self.reference_bits = "0" * max(self.qubit_hamiltonian.n_qubits, 1)

        n_qubits = max(self.qubit_hamiltonian.n_qubits, len(self.reference_bits))
        if len(self.reference_bits) != n_qubits:
            raise ValidationError(
                f"reference bitstring has {len(self.reference_bits)} bits for an "
                f"{n_qubits}-qubit Hamiltonian"
            )
        for char in self.reference_bits:
            if char not in "01":
                raise ValidationError(f"bad reference bitstring {self.reference_bits!r}")

        ansatz = config.ansatz
        if ansatz.kind == "HEA":
            self.circuit = hea_build_circuit(self.reference_bits, ansatz.hea)
        elif ansatz.kind == "QCC":
            self.generator_set = qcc_screen_generators(
                self.qubit_hamiltonian,
                self.reference_bits,
                ansatz.qcc.deqcc_dtau_thresh,
                ansatz.qcc.max_qcc_gens,
            )
            self.generator_set.bloch_layer = ansatz.qcc.bloch_layer
            self.circuit = qcc_build_circuit(self.generator_set, self.reference_bits)
        else:
            self.circuit = reference_circuit(self.reference_bits) + ansatz.custom_circuit

        self.initial_var_params = self._initial_parameters()
        self._built = True
        return self

    def _initial_parameters(self) -> np.ndarray:
        n_params = len(self.circuit.variational_gates)
        policy = self.config.initial_var_params
        if isinstance(policy, str):
            if policy == "zeros":
                return np.zeros(n_params)
            if policy == "random":
                # QCC randomizes over [-tau_guess, +tau_guess]; other ansatze
                # use 0.1 rad, wide enough to break the reference-state saddle
                if self.config.ansatz.kind == "QCC":
                    half_range = self.config.ansatz.qcc.tau_guess
                else:
                    half_range = 0.1
                rng = np.random.default_rng(self.config.optimizer.seed)
                return rng.uniform(-half_range, half_range, size=n_params)
            raise ValidationError(f"unknown initial parameter policy {policy!r}")
        params = np.asarray(policy, dtype=float)
        if len(params) != n_params:
            raise ValidationError(
                f"got {len(params)} initial parameters for {n_params} variational gates"
            )
        return params

    def _require_built(self):
        if not self._built:
            raise LifecycleError("call build() first")

    # -- evaluation -------------------------------------------------------

    def energy_estimation(self, var_params: Sequence[float]) -> float:
        """Bind parameters and evaluate <H> on the configured backend."""
        self._require_built()
        params = np.asarray(var_params, dtype=float)
        bound = self.circuit.copy()
        bound.bind_variational(params)
        return get_expectation_value(self.qubit_hamiltonian, bound, self.config.backend)

    def simulate(self) -> float:
        """Minimize the energy over the variational parameters.

        Returns the minimal energy found; on optimizer non-convergence the
        best value found is returned and a warning is emitted
        (``self.converged`` False).
        """
        self._require_built()
        self.energy_trace = []

        def objective(params):
            value = self.energy_estimation(params)
            self.energy_trace.append(value)
            return value

        x0 = np.array(self.initial_var_params, dtype=float)
        if len(x0) == 0:
            self.optimal_var_params = x0
            self.optimal_energy = objective(x0)
            self.converged = True
            return self.optimal_energy

        settings = self.config.optimizer
        if settings.method == "spsa":
            best_x, best_f = _spsa_minimize(objective, x0, settings)
            self.converged = True
            self.optimal_var_params = best_x
            self.optimal_energy = float(best_f)
        else:
            options = {
                "fatol": settings.tolerance,
                "xatol": settings.options.get("xatol", 1e-8),
                "maxfev": settings.max_evals,
                **{k: v for k, v in settings.options.items() if k != "xatol"},
            }
            x, best_f, success = x0, None, False
            for _ in range(settings.restarts):
                result = _sciopt.minimize(objective, x, method="Nelder-Mead", options=options)
                x, success = result.x, bool(result.success)
                if best_f is not None and best_f - result.fun < settings.tolerance:
                    best_f = min(best_f, float(result.fun))
                    break
                best_f = float(result.fun)
            self.converged = success
            if not success:
                warnings.warn(
                    f"optimizer stopped without convergence: {result.message}; "
                    "returning the best energy found",
                    RuntimeWarning,
                )
            self.optimal_var_params = np.asarray(x, dtype=float)
            self.optimal_energy = best_f

        self.circuit.bind_variational(self.optimal_var_params)
        return self.optimal_energy

    def best_so_far_trace(self) -> List[float]:
        """Monotone non-increasing running minimum of the energy trace."""
        best = math.inf
        trace = []
        for value in self.energy_trace:
            best = min(best, value)
            trace.append(best)
        return trace

    def get_resources(self) -> Dict[str, int]:
        """Summary of the current circuit and Hamiltonian sizes."""
        self._require_built()
        circuit = self.circuit
        two_qubit = sum(1 for g in circuit.gates if len(g.qubits) >= 2)
        return {
            "qubit_hamiltonian_terms": self.qubit_hamiltonian.n_terms,
            "circuit_width": circuit.width,
            "circuit_gates": circuit.size,
            "circuit_2qubit_gates": two_qubit,
            "circuit_var_gates": len(circuit.variational_gates),
            "vqe_variational_parameters": len(self.initial_var_params),
        }

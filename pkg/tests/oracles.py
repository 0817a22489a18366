"""Independent dense-matrix oracles for the test suite.

Everything here is built from explicit 2x2 matrices and Kronecker
products, deliberately sharing no code with the package's kernels or
mapping machinery.  Qubit 0 is the least significant index bit, matching
the package's documented convention.
"""

import math
from functools import reduce
from itertools import combinations

import numpy as np

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
S = np.diag([1, 1j]).astype(complex)
SDAG = S.conj().T
T = np.diag([1, np.exp(1j * math.pi / 4)]).astype(complex)
TDAG = T.conj().T
P1 = np.array([[0, 0], [0, 1]], dtype=complex)  # |1><1|

PAULI = {"I": I2, "X": X, "Y": Y, "Z": Z}


def rx(theta):
    return np.cos(theta / 2) * I2 - 1j * np.sin(theta / 2) * X


def ry(theta):
    return np.cos(theta / 2) * I2 - 1j * np.sin(theta / 2) * Y


def rz(theta):
    return np.cos(theta / 2) * I2 - 1j * np.sin(theta / 2) * Z


def phase(theta):
    return np.diag([1, np.exp(1j * theta)]).astype(complex)


def kron_chain(factors):
    """factors[k] acts on qubit k (least significant first)."""
    return reduce(lambda acc, m: np.kron(m, acc), factors[1:], factors[0])


def embed(matrix_by_qubit, width):
    """Dense operator with the given single-qubit factors, identity elsewhere."""
    return kron_chain([matrix_by_qubit.get(k, I2) for k in range(width)])


_FIXED = {"H": H, "X": X, "Y": Y, "Z": Z, "S": S, "SDAG": SDAG, "T": T, "TDAG": TDAG}
_ROTATION = {"RX": rx, "RY": ry, "RZ": rz, "PHASE": phase, "CRZ": rz}


def gate_unitary(gate, width):
    """Dense unitary of one package Gate on ``width`` qubits."""
    name = gate.name
    if name == "SWAP":
        a, b = gate.targets
        dim = 1 << width
        matrix = np.zeros((dim, dim), dtype=complex)
        for col in range(dim):
            bit_a, bit_b = (col >> a) & 1, (col >> b) & 1
            row = col & ~((1 << a) | (1 << b)) | (bit_b << a) | (bit_a << b)
            matrix[row, col] = 1.0
        return matrix
    if name in _FIXED:
        base = _FIXED[name]
    elif name in _ROTATION:
        base = _ROTATION[name](float(gate.parameter))
    elif name == "CNOT":
        base = X
    elif name == "CZ":
        base = Z
    else:
        raise ValueError(f"oracle has no rule for gate {name}")
    target = gate.targets[0]
    if not gate.controls:
        return embed({target: base}, width)
    # controlled: I + (projector on all controls = 1) x (U - I) on the target
    factors = {c: P1 for c in gate.controls}
    factors[target] = base - I2
    return np.eye(1 << width, dtype=complex) + embed(factors, width)


def circuit_unitary(circuit, width=None):
    width = circuit.width if width is None else width
    unitary = np.eye(1 << width, dtype=complex)
    for gate in circuit.gates:
        unitary = gate_unitary(gate, width) @ unitary
    return unitary


def circuit_statevector(circuit, width=None):
    width = circuit.width if width is None else width
    state = np.zeros(1 << width, dtype=complex)
    state[0] = 1.0
    return circuit_unitary(circuit, width) @ state


def word_matrix(word, width):
    """Dense matrix of a Pauli word given as ((qubit, axis), ...)."""
    return embed({q: PAULI[a] for q, a in word}, width)


def operator_matrix(op, width):
    dim = 1 << width
    total = np.zeros((dim, dim), dtype=complex)
    for word, coeff in op.terms.items():
        total += coeff * word_matrix(word, width)
    return total


# -- fermionic occupation-basis oracle --------------------------------------

LOWER = np.array([[0, 1], [0, 0]], dtype=complex)


def ladder_matrix(index, action, n_modes):
    """a_index (action 0) or its adjoint (action 1) with the antisymmetry
    Z string on the lower modes; basis index bit k = mode k."""
    op = LOWER.conj().T if action else LOWER
    factors = [Z] * index + [op] + [I2] * (n_modes - index - 1)
    return kron_chain(factors)


def fermion_operator_matrix(fermion_op, n_modes):
    dim = 1 << n_modes
    total = np.zeros((dim, dim), dtype=complex)
    for sequence, coeff in fermion_op.terms.items():
        term = coeff * np.eye(dim, dtype=complex)
        for index, action in sequence:
            term = term @ ladder_matrix(index, action, n_modes)
        total += term
    return total


def sector_indices(n_modes, n_electrons, sz=0, blocked=False):
    """Occupation-basis indices with the given particle number and Sz.

    ``blocked`` selects the all-alpha-first labeling; otherwise modes
    alternate alpha/beta.  Sz in units of electron pairs: n_alpha - n_beta
    = 2 * sz.
    """
    out = []
    for basis in range(1 << n_modes):
        occupations = [(basis >> k) & 1 for k in range(n_modes)]
        if sum(occupations) != n_electrons:
            continue
        if blocked:
            n_alpha = sum(occupations[: n_modes // 2])
        else:
            n_alpha = sum(occupations[0::2])
        if n_alpha - (n_electrons - n_alpha) != 2 * sz:
            continue
        out.append(basis)
    return out


def sector_ground_energy(matrix, indices):
    sub = matrix[np.ix_(indices, indices)]
    return float(np.linalg.eigvalsh(sub)[0])


# -- clique cover -------------------------------------------------------------


def qwc(w1, w2):
    d2 = dict(w2)
    return all(d2.get(q, a) == a for q, a in w1)


def minimum_clique_cover_size(words):
    """Exact minimum number of QWC cliques covering ``words`` (brute force)."""
    words = list(words)
    n = len(words)
    compatible = [[qwc(words[i], words[j]) for j in range(n)] for i in range(n)]

    best = {None: n}

    def cliques_containing(vertex, candidates):
        """All maximal-extension cliques that include ``vertex``."""
        results = []

        def grow(clique, pool):
            extended = False
            for v in pool:
                if all(compatible[v][u] for u in clique):
                    grow(clique | {v}, {u for u in pool if u > v})
                    extended = True
            if not extended:
                results.append(clique)

        grow({vertex}, candidates)
        return results

    memo = {}

    def solve(remaining):
        if not remaining:
            return 0
        key = frozenset(remaining)
        if key in memo:
            return memo[key]
        vertex = min(remaining)
        rest = remaining - {vertex}
        best_here = math.inf
        for clique in cliques_containing(vertex, {v for v in rest}):
            best_here = min(best_here, 1 + solve(remaining - clique))
        memo[key] = best_here
        return best_here

    return solve(set(range(n)))


def random_circuit(rng, n_qubits, n_gates, gate_pool=None, variational=False):
    """Random circuit over the native set (import-light: builds Gate lazily)."""
    from fermiforge.circuits import Gate

    pool = gate_pool or ["H", "X", "Y", "Z", "S", "SDAG", "T", "TDAG",
                         "RX", "RY", "RZ", "PHASE", "CNOT", "CZ", "CRZ", "SWAP"]
    gates = []
    for _ in range(n_gates):
        name = pool[rng.integers(len(pool))]
        if name in ("CNOT", "CZ", "CRZ", "SWAP"):
            a, b = rng.choice(n_qubits, size=2, replace=False)
            parameter = float(rng.uniform(-math.pi, math.pi)) if name == "CRZ" else None
            if name == "SWAP":
                gates.append(Gate("SWAP", [int(a), int(b)]))
            else:
                gates.append(Gate(name, int(a), control=int(b), parameter=parameter))
        elif name in ("RX", "RY", "RZ", "PHASE"):
            gates.append(Gate(name, int(rng.integers(n_qubits)),
                              parameter=float(rng.uniform(-math.pi, math.pi)),
                              is_variational=variational))
        else:
            gates.append(Gate(name, int(rng.integers(n_qubits))))
    from fermiforge.circuits import Circuit

    return Circuit(gates, n_qubits=n_qubits)


def random_hermitian_qubit_operator(rng, n_qubits, n_terms):
    from fermiforge.operators import QubitOperator

    op = QubitOperator.zero()
    axes = "XYZ"
    for _ in range(n_terms):
        support_size = int(rng.integers(1, n_qubits + 1))
        qubits = sorted(rng.choice(n_qubits, size=support_size, replace=False).tolist())
        word = tuple((int(q), axes[rng.integers(3)]) for q in qubits)
        op = op + QubitOperator(word, float(rng.normal()))
    return op


def random_hermitian_fermion_operator(rng, n_modes, n_terms):
    """Random Hermitian combination of 1- and 2-body ladder terms."""
    from fermiforge.operators import FermionOperator

    op = FermionOperator((), float(rng.normal()))
    for _ in range(n_terms):
        coeff = float(rng.normal())
        if rng.random() < 0.5:
            p, q = rng.integers(n_modes), rng.integers(n_modes)
            term = FermionOperator(((int(p), 1), (int(q), 0)), coeff)
        else:
            p, q, r, s = (int(v) for v in rng.integers(n_modes, size=4))
            term = FermionOperator(((p, 1), (q, 1), (r, 0), (s, 0)), coeff)
        op = op + term + term.hermitian_conjugate()
    return op

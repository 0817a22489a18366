"""Fermion-to-qubit mappings and the dense-diagonalization reference oracle.

Three encodings are provided behind one dispatch function:

* Jordan-Wigner (``"JW"``): a_p -> Z_0..Z_{p-1} (X_p + iY_p)/2, the
  Z string acting on qubits *below* the acted index (standard ascending
  convention).
* Bravyi-Kitaev (``"BK"``): Fenwick-tree construction with update, parity
  and remainder sets.
* Symmetry-conserving Bravyi-Kitaev (``"SCBK"``): parity-basis mapping of
  a spin-ordered (all alpha first, then beta) operator followed by
  tapering of the two fixed-parity qubits; requires particle-number and
  Sz conservation and yields an (n_so - 2)-qubit operator.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence

import numpy as np

from .errors import SymmetryError, ValidationError
from .operators import FermionOperator, QubitOperator

EXACT_DIAG_QUBIT_CAP = 12


@dataclass
class MappingConfig:
    """Mapping selection and spin-orbital bookkeeping.

    ``up_then_down`` reorders spin-orbitals from interleaved
    (a0, b0, a1, b1, ...) to blocked (all alpha first, then all beta)
    before mapping; scBK requires it, together with an even
    ``n_spinorbitals`` and the electron count for the taper signs.
    """

    mapping: str
    n_spinorbitals: int
    n_electrons: Optional[int] = None
    up_then_down: bool = False

    def __post_init__(self):
        self.mapping = self.mapping.upper()
        if self.mapping not in ("JW", "BK", "SCBK"):
            raise ValidationError(f"unknown mapping {self.mapping!r} (expected JW, BK or scBK)")
        if self.n_spinorbitals <= 0:
            raise ValidationError("n_spinorbitals must be positive")
        if self.mapping == "SCBK":
            if not self.up_then_down:
                raise ValidationError("scBK requires up_then_down spin-orbital ordering")
            if self.n_spinorbitals % 2 or self.n_spinorbitals < 4:
                raise ValidationError("scBK requires an even n_spinorbitals >= 4")
            if self.n_electrons is None:
                raise ValidationError("scBK requires n_electrons for the taper signs")


def _check_indices(fermion_op: FermionOperator, n_spinorbitals: int) -> None:
    if fermion_op.n_modes > n_spinorbitals:
        raise ValidationError(
            f"operator uses spin-orbital {fermion_op.n_modes - 1} but only "
            f"{n_spinorbitals} are declared"
        )


def _transform(fermion_op: FermionOperator,
               ladder_image: Callable[[int, int], QubitOperator]) -> QubitOperator:
    """Map each ladder sequence through a per-operator image and sum."""
    result = QubitOperator.zero()
    for sequence, coefficient in fermion_op:
        term = QubitOperator.identity(coefficient)
        for index, action in sequence:
            term = term * ladder_image(index, action)
        result = result + term
    return result.compress(0.0)


# -- Jordan-Wigner ------------------------------------------------------


def jordan_wigner(fermion_op: FermionOperator, n_spinorbitals: int) -> QubitOperator:
    """Jordan-Wigner image of a fermionic operator.

    a_p maps to Z_0 ... Z_{p-1} (X_p + iY_p)/2 and the creation operator
    to its conjugate; Hermitian inputs map to Hermitian outputs.

    Raises:
        ValidationError: index out of range.
    """
    _check_indices(fermion_op, n_spinorbitals)

    def ladder(index: int, action: int) -> QubitOperator:
        z_string = tuple((k, "Z") for k in range(index))
        x_part = QubitOperator(z_string + ((index, "X"),), 0.5)
        y_sign = -0.5j if action else 0.5j
        y_part = QubitOperator(z_string + ((index, "Y"),), y_sign)
        return x_part + y_part

    return _transform(fermion_op, ladder)


# -- Bravyi-Kitaev (Fenwick tree) ----------------------------------------


class _FenwickNode:
    __slots__ = ("parent", "children", "index")

    def __init__(self):
        self.parent: Optional[_FenwickNode] = None
        self.children: List[_FenwickNode] = []
        self.index: Optional[int] = None


class FenwickTree:
    """Fenwick (binary indexed) tree over the spin-orbital register.

    Provides the index sets of the Bravyi-Kitaev transform: the update set
    U(j) (ancestors), the children set F(j), the remainder set C(j)
    (children of ancestors below j) and the parity set P(j) = C(j) + F(j).
    """

    def __init__(self, n_modes: int):
        self.nodes = [_FenwickNode() for _ in range(n_modes)]
        if n_modes == 0:
            return
        root = self.nodes[n_modes - 1]
        root.index = n_modes - 1

        def build(left: int, right: int, parent: _FenwickNode) -> None:
            if left >= right:
                return
            pivot = (left + right) >> 1
            child = self.nodes[pivot]
            child.index = pivot
            child.parent = parent
            parent.children.append(child)
            build(left, pivot, child)
            build(pivot + 1, right, parent)

        build(0, n_modes - 1, root)

    def update_set(self, j: int) -> List[int]:
        node = self.nodes[j]
        ancestors = []
        while node.parent is not None:
            node = node.parent
            ancestors.append(node.index)
        return ancestors

    def children_set(self, j: int) -> List[int]:
        return [child.index for child in self.nodes[j].children]

    def remainder_set(self, j: int) -> List[int]:
        result = []
        node = self.nodes[j]
        while node.parent is not None:
            node = node.parent
            result.extend(child.index for child in node.children if child.index < j)
        return result

    def parity_set(self, j: int) -> List[int]:
        return self.remainder_set(j) + self.children_set(j)

    def covered_modes(self, j: int) -> List[int]:
        """j plus all its descendants: the modes whose occupation parity
        the Bravyi-Kitaev qubit j stores."""
        stack, out = [self.nodes[j]], []
        while stack:
            node = stack.pop()
            out.append(node.index)
            stack.extend(node.children)
        return sorted(out)


def bravyi_kitaev(fermion_op: FermionOperator, n_spinorbitals: int) -> QubitOperator:
    """Bravyi-Kitaev image via the Fenwick-tree update/parity/remainder sets.

    Each ladder operator is the half-sum of two Majorana components:
    c_j = X_j Z_{P(j)} X_{U(j)} and d_j = Y_j Z_{C(j)} X_{U(j)}, with
    a_j = (c_j + i d_j)/2 and the creation operator its conjugate.
    """
    _check_indices(fermion_op, n_spinorbitals)
    tree = FenwickTree(n_spinorbitals)

    def ladder(index: int, action: int) -> QubitOperator:
        update = [(k, "X") for k in tree.update_set(index)]
        c_word = tuple(sorted([(index, "X")] + [(k, "Z") for k in tree.parity_set(index)] + update))
        d_word = tuple(sorted([(index, "Y")] + [(k, "Z") for k in tree.remainder_set(index)] + update))
        d_sign = -0.5j if action else 0.5j
        return QubitOperator(c_word, 0.5) + QubitOperator(d_word, d_sign)

    return _transform(fermion_op, ladder)


# -- parity mapping and scBK ---------------------------------------------


def parity_transform(fermion_op: FermionOperator, n_spinorbitals: int) -> QubitOperator:
    """Parity-basis image: qubit j stores the occupation parity of modes 0..j.

    a_j maps to X_{j+1..n-1} (X_j Z_{j-1} + iY_j)/2 (the X string updates
    all higher parity bits), creation to its conjugate.
    """
    _check_indices(fermion_op, n_spinorbitals)

    def ladder(index: int, action: int) -> QubitOperator:
        x_string = [(k, "X") for k in range(index + 1, n_spinorbitals)]
        xz_word = [(index, "X")] + x_string
        if index > 0:
            xz_word.append((index - 1, "Z"))
        y_word = [(index, "Y")] + x_string
        y_sign = -0.5j if action else 0.5j
        return QubitOperator(tuple(sorted(xz_word)), 0.5) + QubitOperator(tuple(sorted(y_word)), y_sign)

    return _transform(fermion_op, ladder)


def _check_spin_sector_conservation(fermion_op: FermionOperator, n_spinorbitals: int) -> None:
    """Each term must conserve the particle count within both spin blocks.

    Assumes blocked (up_then_down) ordering: modes < n/2 are alpha.
    """
    half = n_spinorbitals // 2
    for sequence, _ in fermion_op:
        alpha = beta = 0
        for index, action in sequence:
            delta = 1 if action else -1
            if index < half:
                alpha += delta
            else:
                beta += delta
        if alpha or beta:
            raise SymmetryError(
                f"term {sequence} changes the (alpha, beta) electron counts by "
                f"({alpha}, {beta}); scBK requires particle-number and Sz conservation"
            )


def symmetry_conserving_bravyi_kitaev(fermion_op: FermionOperator, n_spinorbitals: int,
                                      n_electrons: int) -> QubitOperator:
    """Parity mapping plus tapering of the two fixed-parity qubits.

    The input must already be in blocked spin ordering (all alpha modes
    first).  Under that ordering qubit n/2-1 stores the alpha-block parity
    and qubit n-1 the total parity; both are constants of motion for
    symmetry-conserving operators, so their Z eigenvalues are substituted
    ((-1)**n_alpha and (-1)**n_electrons, Sz = 0 sector) and the two
    qubits removed, leaving an (n_so - 2)-qubit operator.

    Raises:
        SymmetryError: a term violates particle-number or Sz conservation.
        ValidationError: odd electron count (no Sz = 0 sector) or bad sizes.
    """
    if n_spinorbitals % 2 or n_spinorbitals < 4:
        raise ValidationError("scBK requires an even n_spinorbitals >= 4")
    if n_electrons < 0 or n_electrons % 2:
        raise ValidationError("scBK taper signs assume an even n_electrons (Sz = 0 sector)")
    _check_spin_sector_conservation(fermion_op, n_spinorbitals)

    mapped = parity_transform(fermion_op, n_spinorbitals)

    alpha_qubit = n_spinorbitals // 2 - 1
    total_qubit = n_spinorbitals - 1
    alpha_sign = -1.0 if (n_electrons // 2) % 2 else 1.0
    total_sign = -1.0 if n_electrons % 2 else 1.0

    def relabel(qubit: int) -> int:
        return qubit if qubit < alpha_qubit else qubit - 1

    tapered = QubitOperator.zero()
    for word, coefficient in mapped:
        reduced = []
        for qubit, axis in word:
            if qubit in (alpha_qubit, total_qubit):
                if axis != "Z":
                    raise SymmetryError(
                        f"mapped term {word} acts with {axis} on tapered qubit {qubit}; "
                        "the operator does not conserve the required parities"
                    )
                coefficient *= alpha_sign if qubit == alpha_qubit else total_sign
            else:
                reduced.append((relabel(qubit), axis))
        tapered = tapered + QubitOperator(tuple(sorted(reduced)), coefficient)
    return tapered.compress(0.0)


def reorder_up_then_down(fermion_op: FermionOperator, n_spinorbitals: int) -> FermionOperator:
    """Relabel interleaved spin-orbitals (a0, b0, a1, b1, ...) to blocked
    ordering (all alpha first, then all beta)."""
    if n_spinorbitals % 2:
        raise ValidationError("spin reordering requires an even n_spinorbitals")
    _check_indices(fermion_op, n_spinorbitals)
    half = n_spinorbitals // 2

    def new_index(j: int) -> int:
        return j // 2 if j % 2 == 0 else half + j // 2

    result = FermionOperator.zero()
    for sequence, coefficient in fermion_op:
        relabeled = tuple((new_index(i), a) for i, a in sequence)
        result.terms[relabeled] = result.terms.get(relabeled, 0j) + coefficient
    return result


def fermion_to_qubit_mapping(fermion_op: FermionOperator, config: MappingConfig) -> QubitOperator:
    """Unified mapping dispatch.

    Applies the up_then_down spin reordering when requested, then maps with
    the configured encoding.
    """
    op = fermion_op
    if config.up_then_down:
        op = reorder_up_then_down(op, config.n_spinorbitals)
    if config.mapping == "JW":
        return jordan_wigner(op, config.n_spinorbitals)
    if config.mapping == "BK":
        return bravyi_kitaev(op, config.n_spinorbitals)
    return symmetry_conserving_bravyi_kitaev(op, config.n_spinorbitals, config.n_electrons)


# -- reference state and dense oracle ------------------------------------


def hartree_fock_occupations(config: MappingConfig) -> List[int]:
    """Occupation vector of the aufbau determinant in mapping order.

    Electrons fill interleaved spin-orbitals 0..N-1; the vector is then
    permuted if the mapping uses blocked ordering.
    """
    if config.n_electrons is None:
        raise ValidationError("n_electrons is required to build the reference determinant")
    if config.n_electrons > config.n_spinorbitals:
        raise ValidationError("more electrons than spin-orbitals")
    occupations = [1] * config.n_electrons + [0] * (config.n_spinorbitals - config.n_electrons)
    if config.up_then_down:
        half = config.n_spinorbitals // 2
        blocked = [0] * config.n_spinorbitals
        for j, occ in enumerate(occupations):
            blocked[j // 2 if j % 2 == 0 else half + j // 2] = occ
        occupations = blocked
    return occupations


def hartree_fock_bitstring(config: MappingConfig) -> str:
    """Little-endian qubit bitstring encoding the Hartree-Fock determinant."""
    occupations = hartree_fock_occupations(config)
    n = config.n_spinorbitals
    if config.mapping == "JW":
        bits = occupations
    elif config.mapping == "BK":
        tree = FenwickTree(n)
        bits = [sum(occupations[k] for k in tree.covered_modes(j)) % 2 for j in range(n)]
    else:  # parity bits, then drop the two tapered qubits
        prefix = np.cumsum(occupations) % 2
        keep = [j for j in range(n) if j not in (n // 2 - 1, n - 1)]
        bits = [int(prefix[j]) for j in keep]
    return "".join(str(b) for b in bits)


def qubit_operator_matrix(op: QubitOperator, n_qubits: Optional[int] = None) -> np.ndarray:
    """Dense 2**n x 2**n matrix of a qubit operator (index bit k = qubit k)."""
    n = op.n_qubits if n_qubits is None else n_qubits
    if n < op.n_qubits:
        raise ValidationError(f"operator acts on {op.n_qubits} qubits, asked for {n}")
    n = max(n, 1)
    dim = 1 << n
    matrix = np.zeros((dim, dim), dtype=np.complex128)
    columns = np.arange(dim, dtype=np.uint64)
    for word, coefficient in op:
        x_mask = y_mask = z_mask = 0
        for qubit, axis in word:
            bit = 1 << qubit
            if axis == "X":
                x_mask |= bit
            elif axis == "Y":
                y_mask |= bit
            else:
                z_mask |= bit
        rows = columns ^ np.uint64(x_mask | y_mask)
        parity = (np.bitwise_count(columns & np.uint64(y_mask | z_mask)) & 1).astype(np.float64)
        phase = (1j ** (int(y_mask).bit_count() % 4)) * (1.0 - 2.0 * parity)
        matrix[rows.astype(np.intp), columns.astype(np.intp)] += coefficient * phase
    return matrix


def exact_ground_energy(op: QubitOperator, n_qubits: Optional[int] = None) -> float:
    """Minimum eigenvalue of the dense matrix representation.

    Reference oracle for small problems; refuses more than
    ``EXACT_DIAG_QUBIT_CAP`` qubits and non-Hermitian input.
    """
    n = op.n_qubits if n_qubits is None else n_qubits
    if n > EXACT_DIAG_QUBIT_CAP:
        raise ValidationError(
            f"exact diagonalization is capped at {EXACT_DIAG_QUBIT_CAP} qubits, got {n}"
        )
    matrix = qubit_operator_matrix(op, n)
    if np.max(np.abs(matrix - matrix.conj().T)) > 1e-10:
        raise ValidationError("operator is not Hermitian within 1e-10")
    return float(np.linalg.eigvalsh(matrix)[0])

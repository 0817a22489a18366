"""Generate the bundled H2 fixture (src/fermiforge/data/).

Builds the second-quantized H2 Hamiltonian (minimal basis, R = 0.7414
Angstrom) from published molecular-orbital integrals, computes its
Hartree-Fock and full-CI energies with an independent dense
occupation-number-basis oracle (explicit ladder matrices, no fermiforge
mapping code on that path), and writes:

    h2_sto3g.json    metadata + recorded energies
    h2_fermion.txt   fermionic Hamiltonian (constant term included)
    h2_qubit_jw.txt  Jordan-Wigner image (interleaved spin ordering)

Spin-orbital convention: interleaved, mode 2p = spatial p alpha,
mode 2p+1 = spatial p beta.  Two-electron integrals are in chemist
notation, entering as (pq|rs)/2 a^ p a^ r a s a q summed over spins.

Run from the repository root:  python scripts/generate_h2_fixture.py
"""

import json
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from fermiforge.io import dump_fermion_operator, dump_qubit_operator  # noqa: E402
from fermiforge.mappings import jordan_wigner  # noqa: E402
from fermiforge.operators import FermionOperator  # noqa: E402

# Published H2/STO-3G integrals at R = 0.7414 Angstrom (MO basis,
# chemist notation), as tabulated in standard quantum-chemistry references.
NUCLEAR_REPULSION = 0.713753975
H_ONE = {(0, 0): -1.252477495, (1, 1): -0.475934275}
H_TWO = {  # (pq|rs)
    (0, 0, 0, 0): 0.674493166,
    (1, 1, 1, 1): 0.697397510,
    (0, 0, 1, 1): 0.663472101,
    (1, 1, 0, 0): 0.663472101,
    (0, 1, 0, 1): 0.181287518,
    (1, 0, 1, 0): 0.181287518,
    (0, 1, 1, 0): 0.181287518,
    (1, 0, 0, 1): 0.181287518,
}
N_SPATIAL = 2
N_SPINORB = 2 * N_SPATIAL
N_ELECTRONS = 2


def spin_orbital(p: int, spin: int) -> int:
    return 2 * p + spin


def build_hamiltonian() -> FermionOperator:
    h = FermionOperator((), NUCLEAR_REPULSION)
    for (p, q), value in H_ONE.items():
        for spin in (0, 1):
            h = h + FermionOperator(
                ((spin_orbital(p, spin), 1), (spin_orbital(q, spin), 0)), value)
    for (p, q, r, s), value in H_TWO.items():
        for spin1 in (0, 1):
            for spin2 in (0, 1):
                term = (
                    (spin_orbital(p, spin1), 1),
                    (spin_orbital(r, spin2), 1),
                    (spin_orbital(s, spin2), 0),
                    (spin_orbital(q, spin1), 0),
                )
                h = h + FermionOperator(term, 0.5 * value)
    return h


def dense_oracle(h: FermionOperator) -> np.ndarray:
    """Dense matrix in the occupation basis via explicit ladder matrices.

    Mode p acts as lower = |0><1| on its own factor with a Z string on the
    lower modes for antisymmetry; index bit k of the basis state = mode k.
    """
    lower = np.array([[0, 1], [0, 0]], dtype=complex)
    z = np.diag([1.0, -1.0]).astype(complex)
    identity = np.eye(2, dtype=complex)

    def mode_matrix(index: int, action: int) -> np.ndarray:
        op = lower.conj().T if action else lower
        factors = [z] * index + [op] + [identity] * (N_SPINORB - index - 1)
        matrix = factors[0]
        for factor in factors[1:]:
            matrix = np.kron(factor, matrix)  # later factors more significant
        return matrix

    dim = 2 ** N_SPINORB
    total = np.zeros((dim, dim), dtype=complex)
    for sequence, coefficient in h:
        term = coefficient * np.eye(dim, dtype=complex)
        for index, action in sequence:
            term = term @ mode_matrix(index, action)
        total += term
    return total


def main() -> None:
    data_dir = Path(__file__).resolve().parents[1] / "src" / "fermiforge" / "data"
    data_dir.mkdir(parents=True, exist_ok=True)

    hamiltonian = build_hamiltonian()
    matrix = dense_oracle(hamiltonian)
    assert np.max(np.abs(matrix - matrix.conj().T)) < 1e-12

    fci_energy = float(np.linalg.eigvalsh(matrix)[0])
    hf_index = 0b0011  # modes 0 and 1 occupied
    hf_energy = float(matrix[hf_index, hf_index].real)

    jw_image = jordan_wigner(hamiltonian, N_SPINORB).compress(1e-12)

    (data_dir / "h2_fermion.txt").write_text(
        "# H2 minimal basis, R = 0.7414 A; interleaved spin-orbitals; energies in Hartree\n"
        + dump_fermion_operator(hamiltonian)
    )
    (data_dir / "h2_qubit_jw.txt").write_text(
        "# Jordan-Wigner image of h2_fermion.txt\n" + dump_qubit_operator(jw_image)
    )
    (data_dir / "h2_sto3g.json").write_text(json.dumps({
        "description": "H2, minimal basis, bond length 0.7414 Angstrom",
        "generator": "scripts/generate_h2_fixture.py",
        "n_spinorbitals": N_SPINORB,
        "n_electrons": N_ELECTRONS,
        "nuclear_repulsion": NUCLEAR_REPULSION,
        "hf_energy": hf_energy,
        "fci_energy": fci_energy,
        "one_body_integrals": {f"{p},{q}": v for (p, q), v in H_ONE.items()},
        "two_body_integrals_chemist": {",".join(map(str, k)): v for k, v in H_TWO.items()},
    }, indent=2) + "\n")

    print(f"HF energy : {hf_energy!r}")
    print(f"FCI energy: {fci_energy!r}")
    print(f"JW image  : {jw_image.n_terms} terms on {jw_image.n_qubits} qubits")


if __name__ == "__main__":
    main()

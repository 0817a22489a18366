"""Bundled reference problems.

The H2 fixture (minimal basis, 0.7414 Angstrom bond) ships as data files
generated once by ``scripts/generate_h2_fixture.py`` from published
integrals, with its full-CI energy recorded from an independent dense
occupation-basis oracle.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from .io import parse_fermion_operator, parse_qubit_operator
from .operators import FermionOperator, QubitOperator


@dataclass
class H2Fixture:
    fermion_operator: FermionOperator
    qubit_operator_jw: QubitOperator
    n_spinorbitals: int
    n_electrons: int
    nuclear_repulsion: float
    hf_energy: float
    fci_energy: float


def _data_text(name: str) -> str:
    return (resources.files("fermiforge") / "data" / name).read_text()


def h2_fixture() -> H2Fixture:
    """The bundled H2 problem: fermionic Hamiltonian, its JW image, and
    the recorded Hartree-Fock and full-CI energies (Hartree)."""
    meta = json.loads(_data_text("h2_sto3g.json"))
    return H2Fixture(
        fermion_operator=parse_fermion_operator(_data_text("h2_fermion.txt")),
        qubit_operator_jw=parse_qubit_operator(_data_text("h2_qubit_jw.txt")),
        n_spinorbitals=meta["n_spinorbitals"],
        n_electrons=meta["n_electrons"],
        nuclear_repulsion=meta["nuclear_repulsion"],
        hf_energy=meta["hf_energy"],
        fci_energy=meta["fci_energy"],
    )

"""Geometry handling and fragment-based energy recombination.

ONIOM is the subtractive scheme E = E_all^low + sum_i (E_i^high - E_i^low)
with broken bonds repaired by link atoms placed along the severed bond;
the method of increments expands a correlation energy over orbital
subsets and recombines a truncated series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import ValidationError

ELEMENTS = {
    "H", "He", "Li", "Be", "B", "C", "N", "O", "F", "Ne",
    "Na", "Mg", "Al", "Si", "P", "S", "Cl", "Ar", "K", "Ca",
    "Sc", "Ti", "V", "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn",
    "Ga", "Ge", "As", "Se", "Br", "Kr", "Rb", "Sr", "Y", "Zr",
    "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag", "Cd", "In", "Sn",
    "Sb", "Te", "I", "Xe", "Cs", "Ba", "La", "Ce", "Pr", "Nd",
    "Pm", "Sm", "Eu", "Gd", "Tb", "Dy", "Ho", "Er", "Tm", "Yb",
    "Lu", "Hf", "Ta", "W", "Re", "Os", "Ir", "Pt", "Au", "Hg",
    "Tl", "Pb", "Bi", "Po", "At", "Rn",
}


@dataclass
class Geometry:
    """Atoms as (element symbol, xyz in Angstrom) with charge and spin."""

    atoms: List[Tuple[str, Tuple[float, float, float]]]
    charge: int = 0
    spin: int = 0

    def __post_init__(self):
        checked = []
        for symbol, xyz in self.atoms:
            symbol = symbol.capitalize()
            if symbol not in ELEMENTS:
                raise ValidationError(f"unknown element symbol {symbol!r}")
            coords = tuple(float(c) for c in xyz)
            if len(coords) != 3 or not all(math.isfinite(c) for c in coords):
                raise ValidationError(f"bad coordinates for {symbol}: {xyz!r}")
            checked.append((symbol, coords))
        self.atoms = checked

    @property
    def n_atoms(self) -> int:
        return len(self.atoms)

    def position(self, index: int) -> np.ndarray:
        return np.array(self.atoms[index][1])


def parse_xyz(text: str) -> Geometry:
    """Parse standard XYZ (count line, comment line, atom rows) or a
    headerless body of ``El x y z`` rows."""
    lines = [line for line in text.splitlines()]
    stripped = [line.strip() for line in lines if line.strip()]
    if not stripped:
        raise ValidationError("empty XYZ input")

    body = stripped
    expected = None
    first = stripped[0].split()
    if len(first) == 1 and first[0].isdigit():
        expected = int(first[0])
        body = stripped[2:]  # drop count and comment lines

    atoms = []
    for line in body:
        fields = line.split()
        if len(fields) < 4:
            raise ValidationError(f"malformed XYZ row: {line!r}")
        try:
            xyz = (float(fields[1]), float(fields[2]), float(fields[3]))
        except ValueError as exc:
            raise ValidationError(f"malformed XYZ row: {line!r}") from exc
        atoms.append((fields[0], xyz))
    if expected is not None and expected != len(atoms):
        raise ValidationError(f"XYZ header declares {expected} atoms but {len(atoms)} rows follow")
    return Geometry(atoms)


def format_xyz(geometry: Geometry, comment: str = "") -> str:
    lines = [str(geometry.n_atoms), comment]
    for symbol, (x, y, z) in geometry.atoms:
        lines.append(f"{symbol} {x:.10f} {y:.10f} {z:.10f}")
    return "\n".join(lines) + "\n"


@dataclass
class Link:
    """A severed bond: the staying atom remains in the fragment, the
    leaving atom is replaced by a cap placed at
    r_stay + factor * (r_leave - r_stay)."""

    staying: int
    leaving: int
    factor: float = 0.709
    cap: str = "H"

    def __post_init__(self):
        if self.staying == self.leaving:
            raise ValidationError("link staying and leaving atoms must differ")
        if not 0.0 < self.factor <= 1.0:
            raise ValidationError(f"link factor must be in (0, 1], got {self.factor}")


@dataclass
class FragmentSpec:
    """One ONIOM fragment: atom selection, caps, and solver assignment.

    An empty ``selected_atoms`` denotes the whole system (low solver only).
    """

    selected_atoms: List[int] = field(default_factory=list)
    broken_links: List[Link] = field(default_factory=list)
    charge: int = 0
    solver_low: str = "stub"
    options_low: dict = field(default_factory=dict)
    solver_high: Optional[str] = None
    options_high: dict = field(default_factory=dict)

    @property
    def is_whole_system(self) -> bool:
        return not self.selected_atoms

    def to_dict(self) -> dict:
        return {
            "selected_atoms": list(self.selected_atoms),
            "broken_links": [
                {"staying": l.staying, "leaving": l.leaving, "factor": l.factor, "cap": l.cap}
                for l in self.broken_links
            ],
            "charge": self.charge,
            "solver_low": self.solver_low,
            "options_low": self.options_low,
            "solver_high": self.solver_high,
            "options_high": self.options_high,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FragmentSpec":
        links = [
            Link(d["staying"], d["leaving"], d.get("factor", 0.709), d.get("cap", "H"))
            for d in data.get("broken_links", [])
        ]
        return cls(
            selected_atoms=list(data.get("selected_atoms", [])),
            broken_links=links,
            charge=int(data.get("charge", 0)),
            solver_low=data.get("solver_low", "stub"),
            options_low=dict(data.get("options_low", {})),
            solver_high=data.get("solver_high"),
            options_high=dict(data.get("options_high", {})),
        )


def build_capped_fragment(geometry: Geometry, spec: FragmentSpec) -> Geometry:
    """Fragment geometry: the selected atoms plus one cap atom per link.

    Raises:
        ValidationError: indices out of bounds, staying atom outside the
            selection, or leaving atom inside it.
    """
    if spec.is_whole_system:
        return Geometry(list(geometry.atoms), charge=spec.charge, spin=geometry.spin)
    selected = set(spec.selected_atoms)
    for index in spec.selected_atoms:
        if not 0 <= index < geometry.n_atoms:
            raise ValidationError(f"selected atom {index} out of bounds")
    atoms = [geometry.atoms[i] for i in spec.selected_atoms]
    for link in spec.broken_links:
        for index in (link.staying, link.leaving):
            if not 0 <= index < geometry.n_atoms:
                raise ValidationError(f"link atom {index} out of bounds")
        if link.staying not in selected:
            raise ValidationError(f"link staying atom {link.staying} is not in the fragment")
        if link.leaving in selected:
            raise ValidationError(f"link leaving atom {link.leaving} is inside the fragment")
        stay = geometry.position(link.staying)
        leave = geometry.position(link.leaving)
        cap_position = stay + link.factor * (leave - stay)
        atoms.append((link.cap, tuple(float(c) for c in cap_position)))
    return Geometry(atoms, charge=spec.charge, spin=geometry.spin)


def oniom_energy(e_all_low: float, fragment_pairs: Sequence[Tuple[float, float]]) -> float:
    """E = E_all^low + sum_i (E_i^high - E_i^low)."""
    return e_all_low + sum(high - low for high, low in fragment_pairs)


# -- solver registry -------------------------------------------------------

SolverResult = Tuple[float, Optional[dict]]
Solver = Callable[[Geometry, dict], SolverResult]


def _stub_solver(geometry: Geometry, options: dict) -> SolverResult:
    """Tabulated energy; demands an explicit "energy" option."""
    if "energy" not in options:
        raise ValidationError("stub solver needs an 'energy' option")
    return float(options["energy"]), None


def _exact_diag_solver(geometry: Geometry, options: dict) -> SolverResult:
    """Exact diagonalization of a qubit operator loaded from a file."""
    from .io import load_qubit_operator
    from .mappings import exact_ground_energy

    path = options.get("operator_file")
    if not path:
        raise ValidationError("exact_diag solver needs an 'operator_file' option")
    op = load_qubit_operator(path)
    return exact_ground_energy(op) + float(options.get("constant", 0.0)), None


def _vqe_solver(geometry: Geometry, options: dict) -> SolverResult:
    """Full VQE run from a config dictionary (see io.vqe_config_from_dict)."""
    from .io import vqe_config_from_dict
    from .vqe import VQESolver

    solver = VQESolver(vqe_config_from_dict(options))
    solver.build()
    energy = solver.simulate() + float(options.get("constant", 0.0))
    return energy, solver.get_resources()


def default_solver_registry() -> Dict[str, Solver]:
    return {"stub": _stub_solver, "exact_diag": _exact_diag_solver, "vqe": _vqe_solver}


def run_oniom(geometry: Geometry, fragments: Sequence[FragmentSpec],
              registry: Optional[Dict[str, Solver]] = None
              ) -> Tuple[float, Dict[int, dict]]:
    """Build capped geometries, dispatch solvers, combine subtractively.

    Exactly one fragment must be the whole system (empty selection); every
    other fragment is evaluated with both its low and high solvers on the
    same capped geometry.  Returns the ONIOM energy and the resource
    reports of the fragments whose solvers produced one (keyed by position
    in ``fragments``).

    Raises:
        ValidationError: missing/extra whole-system fragment, or an
            unregistered solver name.
    """
    registry = registry if registry is not None else default_solver_registry()

    def solve(name: Optional[str], fragment_geometry: Geometry, options: dict) -> SolverResult:
        if name is None:
            raise ValidationError("fragment is missing a required solver")
        if name not in registry:
            raise ValidationError(f"solver {name!r} is not registered")
        return registry[name](fragment_geometry, options)

    whole = [f for f in fragments if f.is_whole_system]
    if len(whole) != 1:
        raise ValidationError(
            f"ONIOM needs exactly one whole-system fragment, got {len(whole)}"
        )

    e_all_low: Optional[float] = None
    pairs: List[Tuple[float, float]] = []
    reports: Dict[int, dict] = {}
    for position, spec in enumerate(fragments):
        fragment_geometry = build_capped_fragment(geometry, spec)
        if spec.is_whole_system:
            e_all_low, report = solve(spec.solver_low, fragment_geometry, spec.options_low)
            if report:
                reports[position] = report
            continue
        e_low, report_low = solve(spec.solver_low, fragment_geometry, spec.options_low)
        e_high, report_high = solve(spec.solver_high, fragment_geometry, spec.options_high)
        pairs.append((e_high, e_low))
        report = report_high or report_low
        if report:
            reports[position] = report
    return oniom_energy(e_all_low, pairs), reports


# -- method of increments ---------------------------------------------------

Subset = Tuple[int, ...]


class IncrementTable:
    """Correlation energies E_c(S) for orbital subsets up to a truncation order.

    The subset lattice must be complete below the table's order: every
    nonempty subset of every stored subset must itself be stored.
    """

    def __init__(self, energies: Dict[Subset, float], order: Optional[int] = None):
        self.energies: Dict[Subset, float] = {}
        for subset, value in energies.items():
            key = tuple(sorted(int(i) for i in subset))
            if len(set(key)) != len(key) or not key:
                raise ValidationError(f"bad orbital subset {subset!r}")
            self.energies[key] = float(value)
        if not self.energies:
            raise ValidationError("increment table is empty")
        self.order = order if order is not None else max(len(s) for s in self.energies)

    @property
    def orbitals(self) -> List[int]:
        out = set()
        for subset in self.energies:
            out.update(subset)
        return sorted(out)

    def __getitem__(self, subset: Subset) -> float:
        key = tuple(sorted(subset))
        if key not in self.energies:
            raise ValidationError(f"increment table is missing subset {key}")
        return self.energies[key]

    def __contains__(self, subset: Subset) -> bool:
        return tuple(sorted(subset)) in self.energies


def _proper_subsets(subset: Subset):
    from itertools import combinations

    for size in range(1, len(subset)):
        yield from combinations(subset, size)


def mi_increments(table: IncrementTable) -> Dict[Subset, float]:
    """Many-body increments by inclusion-exclusion over the subset lattice.

    eps(S) = E_c(S) - sum over proper nonempty subsets T of eps(T),
    computed in order of increasing |S|; singletons are eps_i = E_c(i).

    Raises:
        ValidationError: a required subset is missing (named).
    """
    increments: Dict[Subset, float] = {}
    for subset in sorted(table.energies, key=lambda s: (len(s), s)):
        total = table[subset]
        for smaller in _proper_subsets(subset):
            if smaller not in increments:
                raise ValidationError(f"increment table is missing subset {tuple(smaller)}")
            total -= increments[smaller]
        increments[subset] = total
    return increments


def mi_recombine(increments: Dict[Subset, float], order: Optional[int] = None) -> float:
    """Truncated many-body expansion: sum of all increments of size <= order."""
    if order is None:
        order = max((len(s) for s in increments), default=0)
    return sum(value for subset, value in increments.items() if len(subset) <= order)


def mi_truncation_error(increments: Dict[Subset, float], order: int) -> float:
    """Sum of the increments dropped by truncating at ``order``."""
    return sum(value for subset, value in increments.items() if len(subset) > order)

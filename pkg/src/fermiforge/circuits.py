"""Backend-agnostic gate and circuit data structures.

A Gate is little more than a named record (name, targets, controls,
parameter, variational tag); a Circuit is a self-aware ordered list of
gates supporting concatenation (+), repetition (*), inversion, splitting
into non-entangled components and stacking into wider registers.

Gate names are uppercase-normalized and arbitrary names are accepted at
construction; unknown names are only rejected when a circuit is simulated
or translated.
"""

from __future__ import annotations

import copy as _copy
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .errors import UnsupportedGateError, ValidationError

Parameter = Union[float, int, str, None]

#: Gates every bundled backend understands.
NATIVE_GATES = frozenset(
    {
        "H", "X", "Y", "Z", "S", "SDAG", "T", "TDAG",
        "RX", "RY", "RZ", "PHASE", "CNOT", "CZ", "CRZ",
        "SWAP", "MEASURE",
    }
)

#: Gates carrying one real parameter (radians for the rotations).
PARAMETRIC_GATES = frozenset({"RX", "RY", "RZ", "PHASE", "CRZ"})

#: Gate-name support per backend identifier.
SUPPORTED_GATES: Dict[str, frozenset] = {
    "statevector": NATIVE_GATES,
    "qasm2": NATIVE_GATES - {"PHASE", "CRZ"},
}

_SELF_INVERSE = frozenset({"H", "X", "Y", "Z", "CNOT", "CZ", "SWAP"})
_INVERSE_NAME = {"S": "SDAG", "SDAG": "S", "T": "TDAG", "TDAG": "T"}
_NO_INVERSE = frozenset({"MEASURE"})


def _as_index_list(value, label: str) -> List[int]:
    if value is None:
        return []
    if isinstance(value, (int,)):
        value = [value]
    out = []
    for v in value:
        if not isinstance(v, int) or isinstance(v, bool) or v < 0:
            raise ValidationError(f"{label} indices must be non-negative integers, got {v!r}")
        out.append(v)
    return out


class Gate:
    """One quantum gate: name, target(s), optional control(s), optional parameter.

    Args:
        name: Gate identifier; stored uppercase.
        target: Qubit index or list of indices the gate acts on.
        control: Optional control qubit index or list of indices.
        parameter: Real number (radians for rotations) or a free-symbol
            string; a symbolic gate cannot be simulated until bound.
        is_variational: Tag marking the gate for parameter optimization.
    """

    __slots__ = ("name", "targets", "controls", "parameter", "is_variational")

    def __init__(self, name: str, target, control=None, parameter: Parameter = None,
                 is_variational: bool = False):
        self.name = str(name).upper()
        self.targets = _as_index_list(target, "target")
        self.controls = _as_index_list(control, "control")
        if not self.targets:
            raise ValidationError("a gate needs at least one target qubit")
        if len(set(self.targets)) != len(self.targets):
            raise ValidationError(f"duplicate target indices in {self.name}: {self.targets}")
        if len(set(self.controls)) != len(self.controls):
            raise ValidationError(f"duplicate control indices in {self.name}: {self.controls}")
        if set(self.targets) & set(self.controls):
            raise ValidationError(
                f"target and control indices overlap in {self.name}: "
                f"targets={self.targets} controls={self.controls}"
            )
        self.parameter = parameter
        self.is_variational = bool(is_variational)

    @property
    def qubits(self) -> List[int]:
        """All qubit indices touched by the gate (targets then controls)."""
        return self.targets + self.controls

    @property
    def is_symbolic(self) -> bool:
        return isinstance(self.parameter, str)

    def copy(self) -> "Gate":
        return Gate(self.name, list(self.targets), list(self.controls) or None,
                    self.parameter, self.is_variational)

    def inverse(self) -> "Gate":
        """Gate implementing the adjoint; raises for gates without an inverse rule."""
        if self.name in _NO_INVERSE:
            raise UnsupportedGateError(f"gate {self.name} has no inverse rule")
        if self.name in _SELF_INVERSE:
            return self.copy()
        if self.name in _INVERSE_NAME:
            return Gate(_INVERSE_NAME[self.name], list(self.targets),
                        list(self.controls) or None, self.parameter, self.is_variational)
        if self.name in PARAMETRIC_GATES:
            if self.is_symbolic or self.parameter is None:
                raise UnsupportedGateError(
                    f"cannot invert {self.name} with unbound parameter {self.parameter!r}"
                )
            return Gate(self.name, list(self.targets), list(self.controls) or None,
                        -self.parameter, self.is_variational)
        raise UnsupportedGateError(f"gate {self.name} has no inverse rule")

    def __eq__(self, other) -> bool:
        if not isinstance(other, Gate):
            return NotImplemented
        return (
            self.name == other.name
            and self.targets == other.targets
            and self.controls == other.controls
            and self.parameter == other.parameter
            and self.is_variational == other.is_variational
        )

    def __repr__(self) -> str:
        return self.__str__()

    def __str__(self) -> str:
        target = self.targets[0] if len(self.targets) == 1 else self.targets
        text = f"{self.name:<10}target : {target}   "
        if self.controls:
            control = self.controls[0] if len(self.controls) == 1 else self.controls
            text += f"control : {control}   "
        if self.parameter is not None:
            text += f"parameter : {self.parameter}"
        if self.is_variational:
            text += "\t (variational)"
        return text

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "targets": list(self.targets),
            "controls": list(self.controls),
            "parameter": self.parameter,
            "variational": self.is_variational,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Gate":
        return cls(
            data["name"],
            list(data.get("targets", [])),
            list(data.get("controls", [])) or None,
            data.get("parameter"),
            bool(data.get("variational", False)),
        )


def make_gate(name: str, targets, controls=None, parameter: Parameter = None,
              is_variational: bool = False) -> Gate:
    """Functional constructor mirroring :class:`Gate`."""
    return Gate(name, targets, controls, parameter, is_variational)


class Circuit:
    """Ordered list of gates with an optional declared qubit count.

    The effective width is ``max(declared_width, 1 + max qubit index used)``.
    Equality is syntactic: equal ordered gate lists with exact parameter
    equality (not unitary equivalence).
    """

    def __init__(self, gates: Optional[Iterable[Gate]] = None, n_qubits: Optional[int] = None):
        if n_qubits is not None and n_qubits < 0:
            raise ValidationError("declared width must be non-negative")
        self._declared_width = n_qubits
        self._gates: List[Gate] = []
        for gate in gates or []:
            self.add_gate(gate)

    def add_gate(self, gate: Gate) -> None:
        if not isinstance(gate, Gate):
            raise ValidationError(f"expected a Gate, got {type(gate).__name__}")
        self._gates.append(gate)

    # -- introspection ----------------------------------------------------

    @property
    def gates(self) -> List[Gate]:
        return list(self._gates)

    @property
    def size(self) -> int:
        return len(self._gates)

    @property
    def declared_width(self) -> Optional[int]:
        return self._declared_width

    @property
    def width(self) -> int:
        used = 0
        for gate in self._gates:
            used = max(used, 1 + max(gate.qubits))
        return max(self._declared_width or 0, used)

    @property
    def counts(self) -> Dict[str, int]:
        out: Dict[str, int] = {}
        for gate in self._gates:
            out[gate.name] = out.get(gate.name, 0) + 1
        return out

    @property
    def is_variational(self) -> bool:
        return any(g.is_variational for g in self._gates)

    @property
    def variational_gates(self) -> List[Gate]:
        """Ordered mutable view: the actual tagged Gate objects, so setting
        ``parameter`` on an element updates the circuit."""
        return [g for g in self._gates if g.is_variational]

    def used_qubits(self) -> List[int]:
        seen = set()
        for gate in self._gates:
            seen.update(gate.qubits)
        return sorted(seen)

    def has_unbound_parameters(self) -> bool:
        return any(g.is_symbolic for g in self._gates)

    def bind_variational(self, values: Sequence[float]) -> None:
        """Assign parameters to the variational gates in circuit order."""
        gates = self.variational_gates
        if len(values) != len(gates):
            raise ValidationError(
                f"got {len(values)} parameter values for {len(gates)} variational gates"
            )
        for gate, value in zip(gates, values):
            gate.parameter = float(value)

    def copy(self) -> "Circuit":
        return Circuit([g.copy() for g in self._gates], n_qubits=self._declared_width)

    def freeze_width(self) -> "Circuit":
        """Copy with the current effective width pinned as declared width."""
        return Circuit([g.copy() for g in self._gates], n_qubits=self.width)

    # -- structure --------------------------------------------------------

    def __add__(self, other: "Circuit") -> "Circuit":
        if not isinstance(other, Circuit):
            return NotImplemented
        declared = None
        if self._declared_width is not None or other._declared_width is not None:
            declared = max(self._declared_width or 0, other._declared_width or 0)
        return Circuit([g.copy() for g in self._gates] + [g.copy() for g in other._gates],
                       n_qubits=declared)

    def __mul__(self, n: int) -> "Circuit":
        if not isinstance(n, int) or isinstance(n, bool):
            return NotImplemented
        if n < 0:
            raise ValidationError("repetition count must be >= 0")
        result = Circuit(n_qubits=self._declared_width)
        for _ in range(n):
            for gate in self._gates:
                result.add_gate(gate.copy())
        return result

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, Circuit):
            return NotImplemented
        return self._gates == other._gates

    def __ne__(self, other) -> bool:
        eq = self.__eq__(other)
        return NotImplemented if eq is NotImplemented else not eq

    def inverse(self) -> "Circuit":
        """Adjoint circuit: reversed order, parameters negated, S/T daggered."""
        return Circuit([g.inverse() for g in reversed(self._gates)],
                       n_qubits=self._declared_width)

    def split(self, return_map: bool = False):
        """Break the circuit into its non-entangled components.

        Components are connected components of the graph whose vertices are
        used qubits and whose edges join qubits sharing a multi-qubit gate,
        emitted in ascending order of their smallest original qubit index,
        each reindexed to contiguous indices (order preserving).

        Returns the list of component circuits, or, with ``return_map``,
        a ``(circuits, mapping)`` tuple where ``mapping[old_index] ==
        (component, new_index)``.
        """
        qubits = self.used_qubits()
        parent = {q: q for q in qubits}

        def find(q):
            while parent[q] != q:
                parent[q] = parent[parent[q]]
                q = parent[q]
            return q

        for gate in self._gates:
            touched = gate.qubits
            for q in touched[1:]:
                ra, rb = find(touched[0]), find(q)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)

        roots: Dict[int, List[int]] = {}
        for q in qubits:
            roots.setdefault(find(q), []).append(q)
        components = sorted(roots.values(), key=min)

        mapping: Dict[int, Tuple[int, int]] = {}
        for comp_index, members in enumerate(components):
            for new_index, old in enumerate(sorted(members)):
                mapping[old] = (comp_index, new_index)

        circuits = [Circuit(n_qubits=len(members)) for members in components]
        for gate in self._gates:
            comp_index, _ = mapping[gate.qubits[0]]
            relabeled = gate.copy()
            relabeled.targets = [mapping[q][1] for q in gate.targets]
            relabeled.controls = [mapping[q][1] for q in gate.controls]
            circuits[comp_index].add_gate(relabeled)

        if return_map:
            return circuits, mapping
        return circuits

    def __repr__(self) -> str:
        lines = [f"Circuit object. Size {self.size}", ""]
        lines.extend(str(g) for g in self._gates)
        return "\n".join(lines)

    def to_dict(self) -> dict:
        data = {"gates": [g.to_dict() for g in self._gates]}
        if self._declared_width is not None:
            data["width"] = self._declared_width
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "Circuit":
        gates = [Gate.from_dict(g) for g in data.get("gates", [])]
        return cls(gates, n_qubits=data.get("width"))


def concat(a: Circuit, b: Circuit) -> Circuit:
    """Gate list of ``a`` followed by ``b``; width is the max of widths."""
    return a + b


def repeat(circuit: Circuit, n: int) -> Circuit:
    """``circuit`` concatenated ``n`` times (n >= 0)."""
    return circuit * n


def inverse(circuit: Circuit) -> Circuit:
    return circuit.inverse()


def split(circuit: Circuit, return_map: bool = False):
    return circuit.split(return_map=return_map)


def stack(circuits: Sequence[Circuit]) -> Circuit:
    """Combine circuits into one wider register.

    Circuit ``i`` has all its qubit indices offset by the sum of the widths
    of circuits ``0..i-1`` (declared widths included, so idle qubits keep
    their slots); the total width is the sum of the widths.
    """
    result = Circuit(n_qubits=sum(c.width for c in circuits))
    offset = 0
    for circuit in circuits:
        for gate in circuit.gates:
            shifted = gate.copy()
            shifted.targets = [q + offset for q in gate.targets]
            shifted.controls = [q + offset for q in gate.controls]
            result.add_gate(shifted)
        offset += circuit.width
    return result

"""OpenQASM 2.0 emitter and parser for the translatable gate subset.

Emitted documents use a single quantum register ``q`` and classical
register ``c``; parameters are printed with 17 significant digits so the
round trip is lossless.  OpenQASM 3 input is rejected with a clear
message.
"""

from __future__ import annotations

import math
import re
from typing import List, Optional

from .circuits import SUPPORTED_GATES, Circuit, Gate
from .errors import UnsupportedGateError, ValidationError

_TO_QASM_NAME = {
    "H": "h", "X": "x", "Y": "y", "Z": "z",
    "S": "s", "SDAG": "sdg", "T": "t", "TDAG": "tdg",
    "RX": "rx", "RY": "ry", "RZ": "rz",
    "CNOT": "cx", "CZ": "cz", "SWAP": "swap",
}
_FROM_QASM_NAME = {v: k for k, v in _TO_QASM_NAME.items()}
_PARAMETRIC = {"rx", "ry", "rz"}
_TWO_QUBIT = {"cx", "cz", "swap"}


def _format_parameter(value: float) -> str:
    return f"{float(value):.17g}"


def to_qasm(circuit: Circuit) -> str:
    """Serialize a circuit to OpenQASM 2.0.

    Raises:
        UnsupportedGateError: gate outside the QASM subset (named).
        ValidationError: unbound symbolic parameter.
    """
    width = max(circuit.width, 1)
    lines = [
        "OPENQASM 2.0;",
        'include "qelib1.inc";',
        f"qreg q[{width}];",
        f"creg c[{width}];",
    ]
    for gate in circuit.gates:
        if gate.name not in SUPPORTED_GATES["qasm2"]:
            raise UnsupportedGateError(f"gate {gate.name} has no OpenQASM 2.0 translation")
        if gate.is_symbolic:
            raise ValidationError(
                f"gate {gate.name} has unbound parameter {gate.parameter!r}; bind before export"
            )
        if gate.name == "MEASURE":
            q = gate.targets[0]
            lines.append(f"measure q[{q}] -> c[{q}];")
            continue
        qasm_name = _TO_QASM_NAME[gate.name]
        if gate.name == "CNOT" or gate.name == "CZ":
            if len(gate.controls) != 1:
                raise UnsupportedGateError(
                    f"{gate.name} with {len(gate.controls)} controls has no QASM 2.0 form"
                )
            operands = f"q[{gate.controls[0]}],q[{gate.targets[0]}]"
        elif gate.name == "SWAP":
            operands = f"q[{gate.targets[0]}],q[{gate.targets[1]}]"
        else:
            if gate.controls:
                raise UnsupportedGateError(f"controlled {gate.name} has no QASM 2.0 form")
            operands = f"q[{gate.targets[0]}]"
        if gate.name in ("RX", "RY", "RZ"):
            lines.append(f"{qasm_name}({_format_parameter(gate.parameter)}) {operands};")
        else:
            lines.append(f"{qasm_name} {operands};")
    return "\n".join(lines) + "\n"


_QUBIT_RE = re.compile(r"q\[(\d+)\]")
_STATEMENT_RE = re.compile(r"^(?P<name>[a-z]+)\s*(?:\((?P<param>[^)]*)\))?\s*(?P<args>[^;]*)$")


def _parse_parameter(text: str, line_number: int) -> float:
    expression = text.strip().replace("pi", repr(math.pi))
    if not re.fullmatch(r"[0-9eE+\-.*/() ]+", expression):
        raise ValidationError(f"line {line_number}: cannot parse parameter {text!r}")
    try:
        return float(eval(expression, {"__builtins__": {}}, {}))  # arithmetic only
    except Exception as exc:
        raise ValidationError(f"line {line_number}: cannot parse parameter {text!r}") from exc


def from_qasm(document: str) -> Circuit:
    """Parse an OpenQASM 2.0 document using the supported subset.

    Raises:
        ValidationError: syntax errors (with line number), version 3 input,
            multiple quantum registers.
        UnsupportedGateError: statement outside the supported subset.
    """
    circuit: Optional[Circuit] = None
    register: Optional[str] = None
    saw_version = False

    # split on semicolons but keep line numbers for error messages
    statements: List[tuple[int, str]] = []
    for line_number, raw in enumerate(document.splitlines(), start=1):
        line = raw.split("//")[0].strip()
        if not line:
            continue
        for piece in line.split(";"):
            piece = piece.strip()
            if piece:
                statements.append((line_number, piece))

    for line_number, statement in statements:
        if statement.startswith("OPENQASM"):
            version = statement.split()[-1]
            if version.startswith("3"):
                raise ValidationError(
                    f"line {line_number}: OpenQASM 3 is not supported, use version 2.0"
                )
            if not version.startswith("2"):
                raise ValidationError(f"line {line_number}: unsupported OPENQASM version {version}")
            saw_version = True
            continue
        if statement.startswith("include"):
            continue
        if statement.startswith("qreg"):
            match = re.fullmatch(r"qreg\s+([a-zA-Z_]\w*)\[(\d+)\]", statement)
            if not match:
                raise ValidationError(f"line {line_number}: malformed qreg statement")
            if register is not None:
                raise ValidationError(f"line {line_number}: only a single quantum register is supported")
            register = match.group(1)
            circuit = Circuit(n_qubits=int(match.group(2)))
            continue
        if statement.startswith("creg"):
            continue
        if circuit is None:
            raise ValidationError(f"line {line_number}: gate statement before qreg declaration")
        if statement.startswith("measure"):
            match = re.fullmatch(r"measure\s+q\[(\d+)\]\s*->\s*c\[(\d+)\]", statement)
            if not match:
                raise ValidationError(f"line {line_number}: malformed measure statement")
            circuit.add_gate(Gate("MEASURE", int(match.group(1))))
            continue

        match = _STATEMENT_RE.match(statement)
        if not match:
            raise ValidationError(f"line {line_number}: cannot parse statement {statement!r}")
        name = match.group("name")
        if name not in _FROM_QASM_NAME:
            raise UnsupportedGateError(f"line {line_number}: unsupported QASM statement {name!r}")
        qubits = [int(q) for q in _QUBIT_RE.findall(match.group("args"))]
        expected = 2 if name in _TWO_QUBIT else 1
        if len(qubits) != expected:
            raise ValidationError(
                f"line {line_number}: {name} expects {expected} qubit operand(s), got {len(qubits)}"
            )
        parameter = None
        if name in _PARAMETRIC:
            if match.group("param") is None:
                raise ValidationError(f"line {line_number}: {name} needs a parameter")
            parameter = _parse_parameter(match.group("param"), line_number)
        elif match.group("param") is not None:
            raise ValidationError(f"line {line_number}: {name} takes no parameter")

        if name in ("cx", "cz"):
            circuit.add_gate(Gate(_FROM_QASM_NAME[name], qubits[1], control=qubits[0]))
        elif name == "swap":
            circuit.add_gate(Gate("SWAP", qubits))
        else:
            circuit.add_gate(Gate(_FROM_QASM_NAME[name], qubits[0], parameter=parameter))

    if not saw_version:
        raise ValidationError("missing OPENQASM version header")
    if circuit is None:
        raise ValidationError("missing qreg declaration")
    return circuit

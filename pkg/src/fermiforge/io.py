"""File formats: operator text files, circuit/histogram/noise JSON,
increment tables, RDM binaries, and config assembly for the CLI.

Text formats are UTF-8, line oriented, ``#`` comments allowed.
Operator lines are ``(<re>,<im>) [<factors>]`` with Pauli factors like
``X0 Z1`` (identity ``[]``) or ladder factors like ``1^ 0`` (``^`` marks
creation).
"""

from __future__ import annotations

import json
import re
from pathlib import Path
from typing import Dict, Optional, Tuple, Union

import numpy as np

from .circuits import Circuit
from .errors import ValidationError
from .mappings import MappingConfig
from .operators import (FermionOperator, PauliWord, QubitOperator,
                        word_from_string, word_to_string)
from .simulator import BackendConfig, Histogram, NoiseModel

_LINE_RE = re.compile(r"^\(\s*(?P<re>[^,\s]+)\s*,\s*(?P<im>[^)\s]+)\s*\)\s*\[(?P<body>[^\]]*)\]$")


def _iter_operator_lines(text: str):
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#")[0].strip()
        if not line:
            continue
        match = _LINE_RE.match(line)
        if not match:
            raise ValidationError(f"line {line_number}: expected '(re,im) [factors]', got {raw!r}")
        try:
            coefficient = complex(float(match.group("re")), float(match.group("im")))
        except ValueError as exc:
            raise ValidationError(f"line {line_number}: bad coefficient in {raw!r}") from exc
        yield line_number, coefficient, match.group("body").strip()


def parse_qubit_operator(text: str) -> QubitOperator:
    op = QubitOperator.zero()
    for _, coefficient, body in _iter_operator_lines(text):
        word = word_from_string(body)
        op.terms[word] = op.terms.get(word, 0j) + coefficient
    return op


def dump_qubit_operator(op: QubitOperator) -> str:
    lines = []
    for word in sorted(op.terms):
        c = op.terms[word]
        lines.append(f"({c.real!r},{c.imag!r}) [{word_to_string(word)}]")
    return "\n".join(lines) + "\n"


def parse_fermion_operator(text: str) -> FermionOperator:
    op = FermionOperator.zero()
    for line_number, coefficient, body in _iter_operator_lines(text):
        try:
            term = FermionOperator(body if body else (), 1.0)
        except (ValueError, ValidationError) as exc:
            raise ValidationError(f"line {line_number}: bad ladder term {body!r}") from exc
        key = next(iter(term.terms))
        op.terms[key] = op.terms.get(key, 0j) + coefficient
    return op


def dump_fermion_operator(op: FermionOperator) -> str:
    lines = []
    for sequence in sorted(op.terms):
        c = op.terms[sequence]
        body = " ".join(f"{i}^" if a else f"{i}" for i, a in sequence)
        lines.append(f"({c.real!r},{c.imag!r}) [{body}]")
    return "\n".join(lines) + "\n"


def load_qubit_operator(path) -> QubitOperator:
    return parse_qubit_operator(Path(path).read_text())


def load_fermion_operator(path) -> FermionOperator:
    return parse_fermion_operator(Path(path).read_text())


# -- JSON formats ----------------------------------------------------------


def load_circuit(path) -> Circuit:
    data = json.loads(Path(path).read_text())
    try:
        return Circuit.from_dict(data)
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed circuit JSON in {path}: {exc}") from exc


def save_circuit(circuit: Circuit, path) -> None:
    Path(path).write_text(json.dumps(circuit.to_dict(), indent=2) + "\n")


def load_histogram(path) -> Histogram:
    data = json.loads(Path(path).read_text())
    if not isinstance(data, dict):
        raise ValidationError(f"histogram JSON must be an object, got {type(data).__name__}")
    return {str(k): float(v) for k, v in data.items()}


def load_noise_model(path) -> NoiseModel:
    data = json.loads(Path(path).read_text())
    try:
        return NoiseModel.from_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed noise model JSON in {path}: {exc}") from exc


def histogram_by_term_from_json(data: dict) -> Dict[PauliWord, Histogram]:
    """Parse ``{"X0 Z1": {bitstring: freq}}`` maps (keys are canonical words)."""
    out = {}
    for key, freqs in data.items():
        out[word_from_string(key)] = {str(b): float(f) for b, f in freqs.items()}
    return out


def measurement_map_to_json(mapping) -> dict:
    """MeasurementMap -> {"parent": {"member": [re, im]}} with canonical keys."""
    out = {}
    for parent, sub in mapping.items():
        out[word_to_string(parent)] = {
            word_to_string(word): [c.real, c.imag] for word, c in sorted(sub.terms.items())
        }
    return out


def shot_plan_to_json(plan) -> dict:
    return {
        word_to_string(parent): {word_to_string(w): int(s) for w, s in sorted(members.items())}
        for parent, members in plan.items()
    }


def shot_estimate_to_json(estimate) -> dict:
    return {word_to_string(word) if word else "[]": int(shots)
            for word, shots in sorted(estimate.items())}


# -- increment tables --------------------------------------------------------


def parse_subset_key(key: str) -> Tuple[int, ...]:
    body = key.strip().strip("()")
    parts = [p for p in (piece.strip() for piece in body.split(",")) if p]
    try:
        return tuple(sorted(int(p) for p in parts))
    except ValueError as exc:
        raise ValidationError(f"bad orbital subset key {key!r}") from exc


def format_subset_key(subset: Tuple[int, ...]) -> str:
    return "(" + ",".join(str(i) for i in subset) + ")"


def load_increment_table(path):
    from .fragments import IncrementTable

    data = json.loads(Path(path).read_text())
    if not isinstance(data, dict) or not data:
        raise ValidationError(f"increment table in {path} must be a non-empty JSON object")
    return IncrementTable({parse_subset_key(k): float(v) for k, v in data.items()})


def dump_increment_table(table) -> str:
    ordered = sorted(table.energies.items(), key=lambda item: (len(item[0]), item[0]))
    return json.dumps({format_subset_key(s): v for s, v in ordered}, indent=2) + "\n"


# -- RDM binary format -------------------------------------------------------

_RDM_MAGIC = b"FFRDM1\n"


def save_rdm(path, tensor: np.ndarray, convention: str) -> None:
    """Header line (JSON: shape, dtype, convention tag) + row-major bytes."""
    tensor = np.ascontiguousarray(tensor)
    header = json.dumps(
        {"shape": list(tensor.shape), "dtype": str(tensor.dtype), "convention": convention}
    ).encode("utf-8")
    with open(path, "wb") as handle:
        handle.write(_RDM_MAGIC)
        handle.write(header + b"\n")
        handle.write(tensor.tobytes(order="C"))


def load_rdm(path) -> Tuple[np.ndarray, str]:
    with open(path, "rb") as handle:
        magic = handle.read(len(_RDM_MAGIC))
        if magic != _RDM_MAGIC:
            raise ValidationError(f"{path} is not a fermiforge RDM file")
        header = json.loads(handle.readline().decode("utf-8"))
        data = handle.read()
    tensor = np.frombuffer(data, dtype=np.dtype(header["dtype"])).reshape(header["shape"])
    return tensor.copy(), header["convention"]


# -- config assembly ---------------------------------------------------------


def backend_config_from_dict(data: dict, base_path: Optional[Path] = None) -> BackendConfig:
    noise = None
    if data.get("noise_file"):
        noise_path = Path(data["noise_file"])
        if base_path and not noise_path.is_absolute():
            noise_path = base_path / noise_path
        noise = load_noise_model(noise_path)
    elif data.get("noise"):
        noise = NoiseModel.from_dict(data["noise"])
    return BackendConfig(
        target=data.get("target", "auto"),
        n_shots=data.get("n_shots"),
        noise_model=noise,
        seed=data.get("seed"),
    )


def mapping_config_from_dict(data: dict) -> MappingConfig:
    try:
        return MappingConfig(
            mapping=data["mapping"],
            n_spinorbitals=int(data["n_spinorbitals"]),
            n_electrons=data.get("n_electrons"),
            up_then_down=bool(data.get("up_then_down", False)),
        )
    except KeyError as exc:
        raise ValidationError(f"mapping config is missing key {exc}") from exc


def vqe_config_from_dict(data: dict, base_path: Optional[Path] = None):
    """Assemble a VQEConfig from its JSON form.

    Expected blocks: ``hamiltonian`` (with ``qubit_file`` or
    ``fermion_file`` + ``mapping``), ``ansatz``, optional ``reference``,
    ``initial_var_params``, ``optimizer`` and ``backend``.
    """
    from .vqe import AnsatzSpec, HEAOptions, OptimizerSettings, QCCOptions, VQEConfig

    def resolve(path_text: str) -> Path:
        path = Path(path_text)
        if base_path and not path.is_absolute():
            path = base_path / path
        return path

    hamiltonian = data.get("hamiltonian", {})
    qubit_op = fermion_op = mapping = None
    if "qubit_file" in hamiltonian:
        qubit_op = load_qubit_operator(resolve(hamiltonian["qubit_file"]))
    elif "fermion_file" in hamiltonian:
        fermion_op = load_fermion_operator(resolve(hamiltonian["fermion_file"]))
        mapping = mapping_config_from_dict(hamiltonian.get("mapping", {}))
    else:
        raise ValidationError("hamiltonian block needs 'qubit_file' or 'fermion_file'")

    ansatz_data = data.get("ansatz", {"kind": "HEA"})
    kind = ansatz_data.get("kind", "HEA").upper()
    hea = HEAOptions(
        n_layers=int(ansatz_data.get("n_layers", 2)),
        rotation_axes=tuple(ansatz_data.get("rotation_axes", ("RY", "RZ"))),
        entangler=ansatz_data.get("entangler", "linear"),
    )
    qcc = QCCOptions(
        tau_guess=float(ansatz_data.get("qcc_tau_guess", 1e-2)),
        deqcc_dtau_thresh=float(ansatz_data.get("deqcc_dtau_thresh", 1e-3)),
        max_qcc_gens=ansatz_data.get("max_qcc_gens"),
        bloch_layer=bool(ansatz_data.get("bloch_layer", False)),
    )
    custom = None
    if kind == "CUSTOM":
        if "circuit_file" not in ansatz_data:
            raise ValidationError("CUSTOM ansatz needs a 'circuit_file'")
        custom = load_circuit(resolve(ansatz_data["circuit_file"]))
    ansatz = AnsatzSpec(kind, hea=hea, qcc=qcc, custom_circuit=custom)

    optimizer_data = data.get("optimizer", {})
    optimizer = OptimizerSettings(
        method=optimizer_data.get("method", "nelder-mead"),
        tolerance=float(optimizer_data.get("tolerance", 1e-7)),
        max_evals=int(optimizer_data.get("max_evals", 5000)),
        seed=optimizer_data.get("seed"),
        restarts=int(optimizer_data.get("restarts", 5)),
        options=dict(optimizer_data.get("options", {})),
    )

    return VQEConfig(
        qubit_hamiltonian=qubit_op,
        fermion_operator=fermion_op,
        mapping=mapping,
        ansatz=ansatz,
        reference_bitstring=data.get("reference"),
        initial_var_params=data.get("initial_var_params", "zeros"),
        optimizer=optimizer,
        backend=backend_config_from_dict(data.get("backend", {}), base_path),
    )

"""Command-line entry points.

Subcommands: simulate, expval, vqe, group, estimate-shots, translate,
oniom, mi, bootstrap, split, stack, inverse.  Exit codes: 0 success,
1 validation error (including usage errors), 2 runtime error.

All randomness funnels through one ``--seed`` flag (default from the
``FERMIFORGE_SEED`` environment variable), expanded internally into named
per-stage streams.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .errors import FermiforgeError, ValidationError


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(f"{message}\n{self.format_usage()}")


def _common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None,
                        help="root RNG seed (default: env FERMIFORGE_SEED)")
    parser.add_argument("--shots", type=int, default=None,
                        help="number of shots; 0 or omitted = exact mode")
    parser.add_argument("--noise", metavar="FILE", default=None,
                        help="noise model JSON file (requires --shots)")
    parser.add_argument("--output", metavar="PATH", default=None,
                        help="write the result here instead of stdout")
    parser.add_argument("--format", choices=("json", "text"), default="json",
                        dest="out_format", help="output format")


def _seed_of(args) -> int | None:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("FERMIFORGE_SEED")
    return int(env) if env else None


def _backend_of(args):
    from .io import load_noise_model
    from .simulator import BackendConfig

    shots = args.shots if args.shots else None
    noise = load_noise_model(args.noise) if args.noise else None
    return BackendConfig(n_shots=shots, noise_model=noise, seed=_seed_of(args))


def _emit(args, payload: dict, text_lines=None) -> None:
    if args.out_format == "text" and text_lines is not None:
        body = "\n".join(text_lines) + "\n"
    else:
        body = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if args.output:
        Path(args.output).write_text(body)
    else:
        sys.stdout.write(body)


def _cmd_simulate(args) -> int:
    from .io import load_circuit
    from .simulator import simulate

    histogram, _ = simulate(load_circuit(args.circuit), _backend_of(args))
    ordered = dict(sorted(histogram.items()))
    _emit(args, ordered, [f"{k} {v}" for k, v in ordered.items()])
    return 0


def _cmd_expval(args) -> int:
    from .io import load_circuit, load_qubit_operator
    from .simulator import get_expectation_value

    value = get_expectation_value(load_qubit_operator(args.operator),
                                  load_circuit(args.circuit), _backend_of(args))
    _emit(args, {"value": value}, [f"{value!r}"])
    return 0


def _cmd_vqe(args) -> int:
    from .io import vqe_config_from_dict
    from .vqe import VQESolver

    config_path = Path(args.config)
    data = json.loads(config_path.read_text())
    if args.seed is not None and "seed" not in data.get("optimizer", {}):
        data.setdefault("optimizer", {})["seed"] = args.seed
    solver = VQESolver(vqe_config_from_dict(data, base_path=config_path.parent))
    solver.build()
    energy = solver.simulate()
    payload = {
        "energy": energy,
        "converged": solver.converged,
        "resources": solver.get_resources(),
        "optimal_var_params": [float(p) for p in solver.optimal_var_params],
    }
    _emit(args, payload, [f"energy {energy!r}", f"resources {solver.get_resources()}"])
    return 0


def _cmd_group(args) -> int:
    from .io import load_qubit_operator, measurement_map_to_json
    from .measurements import group_qwc

    mapping = group_qwc(load_qubit_operator(args.operator), seed=_seed_of(args) or 0)
    payload = measurement_map_to_json(mapping)
    _emit(args, payload, [f"{parent}: {sorted(members)}" for parent, members in payload.items()])
    return 0


def _cmd_estimate_shots(args) -> int:
    from .io import load_qubit_operator, shot_estimate_to_json
    from .measurements import get_measurement_estimate

    estimate = get_measurement_estimate(load_qubit_operator(args.operator), digits=args.digits)
    payload = shot_estimate_to_json(estimate)
    _emit(args, payload, [f"{term} {shots}" for term, shots in payload.items()])
    return 0


def _cmd_translate(args) -> int:
    from .io import load_circuit
    from .qasm import to_qasm

    circuit = load_circuit(args.circuit)
    if args.to == "qasm":
        body = to_qasm(circuit)
        if args.output:
            Path(args.output).write_text(body)
        else:
            sys.stdout.write(body)
    else:
        _emit(args, circuit.to_dict())
    return 0


def _cmd_oniom(args) -> int:
    from .fragments import FragmentSpec, parse_xyz, run_oniom

    spec_path = Path(args.spec)
    data = json.loads(spec_path.read_text())
    if "geometry_file" in data:
        geometry_path = Path(data["geometry_file"])
        if not geometry_path.is_absolute():
            geometry_path = spec_path.parent / geometry_path
        xyz_text = geometry_path.read_text()
    elif "geometry_xyz" in data:
        xyz_text = data["geometry_xyz"]
    else:
        raise ValidationError("ONIOM spec needs 'geometry_file' or 'geometry_xyz'")
    geometry = parse_xyz(xyz_text)
    fragments = [FragmentSpec.from_dict(f) for f in data.get("fragments", [])]
    energy, reports = run_oniom(geometry, fragments)
    payload = {"energy": energy, "resources": {str(k): v for k, v in reports.items()}}
    _emit(args, payload, [f"energy {energy!r}"])
    return 0


def _cmd_mi(args) -> int:
    from .fragments import mi_increments, mi_recombine, mi_truncation_error
    from .io import format_subset_key, load_increment_table

    table = load_increment_table(args.table)
    increments = mi_increments(table)
    order = args.order if args.order is not None else table.order
    energy = mi_recombine(increments, order)
    payload = {
        "correlation_energy": energy,
        "order": order,
        "truncation_error": mi_truncation_error(increments, order),
        "increments": {format_subset_key(s): v
                       for s, v in sorted(increments.items(), key=lambda i: (len(i[0]), i[0]))},
    }
    _emit(args, payload, [f"correlation_energy {energy!r} (order {order})"])
    return 0


def _cmd_bootstrap(args) -> int:
    from .io import (histogram_by_term_from_json, load_fermion_operator,
                     load_qubit_operator, mapping_config_from_dict)
    from .postprocessing import bootstrap_statistics, rdm_energy_statistic

    spec_path = Path(args.spec)
    spec = json.loads(spec_path.read_text())
    freq_by_term = histogram_by_term_from_json(json.loads(Path(args.histograms).read_text()))
    n_shots = int(spec["n_shots"])
    n_resamples = int(spec.get("n_resamples", 1000))
    seed = spec.get("seed", _seed_of(args))

    def resolve(path_text):
        path = Path(path_text)
        return path if path.is_absolute() else spec_path.parent / path

    pipeline = spec.get("pipeline", "operator")
    if pipeline == "rdm_energy":
        fermion_op = load_fermion_operator(resolve(spec["fermion_file"]))
        mapping = mapping_config_from_dict(spec["mapping"])
        statistic = rdm_energy_statistic(fermion_op, mapping,
                                         purify=bool(spec.get("purify", False)),
                                         conv=float(spec.get("conv", 1e-2)))
    elif pipeline == "operator":
        op = load_qubit_operator(resolve(spec["operator_file"]))

        def statistic(expectations):
            total = op.constant().real
            for word, coefficient in op:
                if word:
                    total += coefficient.real * expectations[word]
            return total
    else:
        raise ValidationError(f"unknown bootstrap pipeline {pipeline!r}")

    report = bootstrap_statistics(freq_by_term, n_shots, n_resamples, statistic, seed)
    _emit(args, report.to_dict(), [f"mean {report.mean!r}", f"stdev {report.stdev!r}"])
    return 0


def _cmd_split(args) -> int:
    from .io import load_circuit

    circuits, mapping = load_circuit(args.circuit).split(return_map=True)
    payload = {
        "components": [c.to_dict() for c in circuits],
        "qubit_map": {str(old): list(new) for old, new in sorted(mapping.items())},
    }
    _emit(args, payload)
    return 0


def _cmd_stack(args) -> int:
    from .circuits import stack
    from .io import load_circuit

    stacked = stack([load_circuit(p) for p in args.circuits])
    _emit(args, stacked.to_dict())
    return 0


def _cmd_inverse(args) -> int:
    from .io import load_circuit

    _emit(args, load_circuit(args.circuit).inverse().to_dict())
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="fermiforge",
                     description="Quantum-chemistry workflow toolkit CLI")
    parser.add_argument("--version", action="version", version=f"fermiforge {__version__}")
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")

    def sub(name, handler, help_text):
        p = subparsers.add_parser(name, help=help_text)
        _common_flags(p)
        p.set_defaults(handler=handler)
        return p

    p = sub("simulate", _cmd_simulate, "simulate a circuit and emit its histogram")
    p.add_argument("circuit", help="circuit JSON file")

    p = sub("expval", _cmd_expval, "expectation value of an operator over a circuit")
    p.add_argument("circuit", help="circuit JSON file")
    p.add_argument("operator", help="qubit operator text file")

    p = sub("vqe", _cmd_vqe, "run a VQE job from a config file")
    p.add_argument("config", help="VQE config JSON file")

    p = sub("group", _cmd_group, "group operator terms by qubit-wise commutativity")
    p.add_argument("operator", help="qubit operator text file")

    p = sub("estimate-shots", _cmd_estimate_shots, "per-term shot estimates")
    p.add_argument("operator", help="qubit operator text file")
    p.add_argument("--digits", type=int, default=2, help="target decimal digits of accuracy")

    p = sub("translate", _cmd_translate, "convert a circuit to QASM or JSON")
    p.add_argument("circuit", help="circuit JSON file")
    p.add_argument("--to", choices=("qasm", "json"), default="qasm")

    p = sub("oniom", _cmd_oniom, "ONIOM fragment energy recombination")
    p.add_argument("spec", help="ONIOM spec JSON file")

    p = sub("mi", _cmd_mi, "method-of-increments recombination")
    p.add_argument("table", help="increment table JSON file")
    p.add_argument("--order", type=int, default=None, help="truncation order")

    p = sub("bootstrap", _cmd_bootstrap, "bootstrap statistics over histograms")
    p.add_argument("histograms", help="JSON file: {term: {bitstring: freq}}")
    p.add_argument("--spec", required=True, help="pipeline spec JSON file")

    p = sub("split", _cmd_split, "split a circuit into non-entangled components")
    p.add_argument("circuit", help="circuit JSON file")

    p = sub("stack", _cmd_stack, "stack circuits into one wider circuit")
    p.add_argument("circuits", nargs="+", help="circuit JSON files")

    p = sub("inverse", _cmd_inverse, "invert a circuit")
    p.add_argument("circuit", help="circuit JSON file")

    return parser


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "command", None):
            parser.print_usage(sys.stderr)
            return 1
        return args.handler(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FermiforgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()

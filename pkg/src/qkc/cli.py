"""Command-line driver: compile kernels to circuit listings or run them on a backend."""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from .backend.selector import backend_names
from .errors import ArgumentMismatch, QkcError, ResourceError
from .frontend.ast import ParamType
from .frontend.registry import KernelRegistry
from .hybrid.pauli import parse_operator
from .ir.circuit import print_circuit
from .mitigation import mitigation_names
from .passes.manager import pass_names
from .pipeline import ExecutionConfig, compile_kernel, instantiate_entry, observable_expectation, run_kernel
from .placement.router import STRATEGIES

EXIT_OK, EXIT_INPUT, EXIT_RESOURCE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    """Usage errors are input errors (exit 1); exit 2 is reserved for resource limits."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _add_flag(parser: argparse.ArgumentParser, name: str, **kwargs) -> None:
    """Register ``-name`` and ``--name`` as the same option."""
    parser.add_argument(f"-{name}", f"--{name}", **kwargs)


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("inputs", nargs="+", help=".qk kernel files or standalone .qasm files")
    _add_flag(parser, "qpu", default="sim", help="backend selector, e.g. sim or sim:seed=3,noise-model=n.json")
    _add_flag(parser, "shots", type=int, default=1024)
    _add_flag(parser, "opt", type=int, default=0, help="optimization level (0 or 1)")
    _add_flag(parser, "opt-pass", action="append", dest="opt_pass", default=None,
              help="run this pass; repeat for an ordered list that replaces -opt")
    _add_flag(parser, "qubit-map", dest="qubit_map", help="logical-to-physical map, e.g. 0,2,1")
    _add_flag(parser, "em", action="append", default=[], help="error mitigation; repeat to stack")
    _add_flag(parser, "qrt", default="nisq", choices=["nisq", "ftqc"], help="runtime mode")
    parser.add_argument("--placement", help="routing strategy: " + ", ".join(STRATEGIES))
    parser.add_argument("--coupling-graph", dest="coupling_graph",
                        help="built-in graph name or JSON file {n, edges}")
    parser.add_argument("--entry", help="kernel to run (default: the last kernel of the last file)")
    parser.add_argument("--args", dest="kernel_args", default="",
                        help="comma-separated kernel arguments; a qreg takes its size, vectors use [..]")
    parser.add_argument("--seed", type=int, help="random seed for the backend")
    parser.add_argument("--inject-x", dest="inject_x", type=int,
                        help="test hook: apply X to this qubit before the kernel body")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qkc", description=__doc__, allow_abbrev=False)
    sub = parser.add_subparsers(dest="command", required=True)
    comp = sub.add_parser("compile", help="print the optimized and placed circuit", allow_abbrev=False)
    _common(comp)
    comp.add_argument("--emit-pass-stats", dest="emit_pass_stats", metavar="PATH",
                      help="write per-pass statistics as JSON to PATH ('-' for stderr)")
    run = sub.add_parser("run", help="execute the entry kernel and print counts", allow_abbrev=False)
    _common(run)
    run.add_argument("--observable", help="Pauli operator, e.g. '5.907 - 2.1433 X0 X1'; prints its expectation")
    sub.add_parser("passes", help="list optimization passes")
    sub.add_parser("backends", help="list backends")
    sub.add_parser("placements", help="list placement strategies")
    sub.add_parser("mitigations", help="list error-mitigation decorators")
    return parser


def split_args(text: str) -> list[str]:
    """Split on commas that are not inside brackets."""
    parts, depth, current = [], 0, []
    for ch in text:
        if ch in "[(":
            depth += 1
        elif ch in "])":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(current).strip())
            current = []
        else:
            current.append(ch)
    tail = "".join(current).strip()
    if tail or parts:
        parts.append(tail)
    return parts


def _literal(text: str, ptype: ParamType, name: str):
    try:
        if ptype in (ParamType.QREG, ParamType.INT):
            return int(text)
        if ptype is ParamType.REAL:
            return float(text)
        inner = text.strip()
        if not (inner.startswith("[") and inner.endswith("]")):
            raise ValueError("vectors are written [a,b,...]")
        conv = float if ptype is ParamType.REAL_VECTOR else int
        return [conv(v) for v in inner[1:-1].split(",") if v.strip()]
    except ValueError as exc:
        raise ArgumentMismatch(f"argument {name!r} ({ptype.value}): cannot parse {text!r}: {exc}") from None


def parse_kernel_args(registry: KernelRegistry, entry: str, text: str) -> list:
    params = registry.get(entry).signature.params
    raw = split_args(text)
    if len(raw) != len(params):
        sig = ", ".join(f"{p.type.value} {p.name}" for p in params)
        raise ArgumentMismatch(f"kernel {entry}({sig}) needs {len(params)} argument(s) via --args, got {len(raw)}")
    return [_literal(t, p.type, p.name) for t, p in zip(raw, params)]


def _config(ns: argparse.Namespace) -> ExecutionConfig:
    qubit_map = None
    if ns.qubit_map:
        try:
            qubit_map = [int(v) for v in ns.qubit_map.split(",")]
        except ValueError:
            raise ArgumentMismatch(f"qubit map must be comma-separated integers, got {ns.qubit_map!r}") from None
    return ExecutionConfig(backend=ns.qpu, shots=ns.shots, opt_level=ns.opt, passes=ns.opt_pass,
                           placement=ns.placement, coupling_graph=ns.coupling_graph,
                           qubit_map=qubit_map, mitigation=list(ns.em), mode=ns.qrt,
                           seed=ns.seed, inject_x=ns.inject_x)


def _load(ns: argparse.Namespace) -> tuple[KernelRegistry, str, list]:
    registry = KernelRegistry()
    names: list[str] = []
    for path in ns.inputs:
        names += registry.load_file(path)
    entry = ns.entry or (names[-1] if names else None)
    if entry is None:
        raise ArgumentMismatch("the input files define no kernels")
    return registry, entry, parse_kernel_args(registry, entry, ns.kernel_args)


def cmd_compile(ns: argparse.Namespace, out) -> int:
    registry, entry, args = _load(ns)
    result = compile_kernel(registry, entry, args, _config(ns))
    print_circuit(result.circuit, out)
    if ns.emit_pass_stats:
        report = json.dumps([s.to_dict() for s in result.pass_stats])
        if ns.emit_pass_stats == "-":
            sys.stderr.write(report + "\n")
        else:
            with open(ns.emit_pass_stats, "w", encoding="utf-8") as fh:
                fh.write(report + "\n")
    return EXIT_OK


def cmd_run(ns: argparse.Namespace, out) -> int:
    registry, entry, args = _load(ns)
    config = _config(ns)
    if ns.observable is not None:
        op = parse_operator("pauli", ns.observable)
        circuit, _, _ = instantiate_entry(registry, entry, args, config.inject_x)
        value = observable_expectation(circuit, op, config)
        out.write(json.dumps({"expectation": value, "shots": config.shots}) + "\n")
        return EXIT_OK
    buffer = run_kernel(registry, entry, args, config)
    payload = buffer.to_json()
    if config.mitigation:
        payload["exp_val_z"] = buffer.exp_val_z()
    out.write(json.dumps(payload) + "\n")
    return EXIT_OK


_LISTINGS = {
    "passes": pass_names,
    "backends": backend_names,
    "placements": lambda: list(STRATEGIES),
    "mitigations": mitigation_names,
}


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    ns = build_parser().parse_args(argv)
    if ns.command in _LISTINGS:
        for name in _LISTINGS[ns.command]():
            out.write(name + "\n")
        return EXIT_OK
    try:
        return cmd_compile(ns, out) if ns.command == "compile" else cmd_run(ns, out)
    except ResourceError as exc:
        sys.stderr.write(f"qkc: resource error: {exc}\n")
        return EXIT_RESOURCE
    except (QkcError, OSError, ValueError) as exc:
        sys.stderr.write(f"qkc: error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

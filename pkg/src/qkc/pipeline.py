"""Compile and execute kernels: optimization, placement, mitigation and runtime dispatch."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .backend.buffer import QRegBuffer
from .backend.runtime import FtqcRuntime, NisqRuntime
from .backend.selector import make_backend
from .backend.simulator import Backend, ExecutionResult
from .errors import ArgumentMismatch, BackendError, PlacementError, QubitOutOfRange
from .frontend.interpreter import QReg
from .frontend.registry import KernelRegistry
from .ir.circuit import DEFAULT_REGISTER, Circuit, Instruction, QubitRef, flatten
from .ir.gates import GateKind
from .mitigation import build_chain
from .mode import ExecutionMode
from .passes.manager import PassStats, run_level, run_passes
from .placement.graph import CouplingGraph, load_graph
from .placement.router import PlacementResult, apply_qubit_map, place


@dataclass
class ExecutionConfig:
    """Everything that shapes how a kernel is compiled and run.

    ``passes``, when given, replaces the passes of ``opt_level``.  A coupling
    graph without a strategy routes with ``ssp``; a ``qubit_map`` alone simply
    relabels qubits, and with a graph it becomes the router's initial layout.
    """
    backend: str | Backend = "sim"
    shots: int = 1024
    opt_level: int = 0
    passes: list[str] | None = None
    placement: str | None = None
    coupling_graph: str | CouplingGraph | None = None
    qubit_map: list[int] | None = None
    mitigation: list[str] = field(default_factory=list)
    mode: ExecutionMode | str = ExecutionMode.NISQ
    seed: int | None = None
    inject_x: int | None = None


@dataclass
class CompileResult:
    logical: Circuit
    circuit: Circuit
    pass_stats: list[PassStats]
    placement: PlacementResult | None = None


def compile_circuit(circuit: Circuit, config: ExecutionConfig) -> CompileResult:
    """Run the configured passes and then placement on an instantiated circuit."""
    if config.passes is not None:
        optimized, report = run_passes(config.passes, circuit)
    else:
        optimized, report = run_level(config.opt_level, circuit)
    graph = config.coupling_graph
    if graph is None:
        if config.placement is not None:
            raise PlacementError(f"placement {config.placement!r} needs a coupling graph")
        if config.qubit_map is not None:
            optimized = apply_qubit_map(optimized, config.qubit_map)
        return CompileResult(circuit, optimized, report)
    if not isinstance(graph, CouplingGraph):
        graph = load_graph(graph)
    placed = place(optimized, graph, config.placement or "ssp", config.qubit_map)
    return CompileResult(circuit, placed.circuit, report, placed)


def _bind_registers(registry: KernelRegistry, name: str, args: Sequence) -> tuple[list, list[QRegBuffer], int]:
    """Give each qreg argument its own block of qubits; returns bound args, buffers, total width."""
    sig = registry.get(name).signature
    if len(args) != len(sig.params):
        raise ArgumentMismatch(f"kernel {name!r} takes {len(sig.params)} argument(s), got {len(args)}")
    bound, buffers, offset = [], [], 0
    for p, v in zip(sig.params, args):
        if p.type.value != "qreg":
            bound.append(v)
            continue
        if isinstance(v, QRegBuffer):
            buf = v
        elif isinstance(v, int) and not isinstance(v, bool) and v >= 1:
            buf = QRegBuffer(v)
        else:
            raise ArgumentMismatch(f"argument {p.name!r} of {name!r} must be a qreg or a size, got {v!r}")
        bound.append(QReg(buf.size, offset))
        buffers.append(buf)
        offset += buf.size
    return bound, buffers, offset


def _injected(index: int | None, width: int) -> list[Instruction]:
    if index is None:
        return []
    if not 0 <= index < width:
        raise QubitOutOfRange(f"cannot inject X on qubit {index} of a {width}-qubit register")
    return [Instruction(GateKind.X, (QubitRef(DEFAULT_REGISTER, index),))]


def instantiate_entry(registry: KernelRegistry, name: str, args: Sequence,
                      inject_x: int | None = None) -> tuple[Circuit, list[QRegBuffer], int]:
    bound, buffers, width = _bind_registers(registry, name, args)
    circuit = Circuit(name, _injected(inject_x, width))
    registry.instantiate(name, bound, parent=circuit)
    top = max((q for i in flatten(circuit) for q in i.indices), default=-1)
    if top >= width:
        raise QubitOutOfRange(f"kernel {name!r} uses qubit {top} but only {width} are allocated")
    return circuit, buffers, width


def compile_kernel(registry: KernelRegistry, name: str, args: Sequence,
                   config: ExecutionConfig | None = None) -> CompileResult:
    config = config or ExecutionConfig()
    circuit, _, _ = instantiate_entry(registry, name, args, config.inject_x)
    return compile_circuit(circuit, config)


def make_execution_backend(config: ExecutionConfig) -> Backend:
    return build_chain(make_backend(config.backend, config.seed), config.mitigation)


def run_circuit(circuit: Circuit, config: ExecutionConfig | None = None) -> ExecutionResult:
    """Compile ``circuit`` per ``config`` and execute it in batched mode."""
    config = config or ExecutionConfig()
    compiled = compile_circuit(circuit, config)
    return make_execution_backend(config).run(compiled.circuit, config.shots)


def run_kernel(registry: KernelRegistry, name: str, args: Sequence,
               config: ExecutionConfig | None = None) -> QRegBuffer:
    """Instantiate, compile and execute ``name``; results land in every qreg buffer.

    Returns the first qreg buffer (a fresh one when the argument was a size).
    """
    config = config or ExecutionConfig()
    mode = ExecutionMode.parse(config.mode)
    if mode is ExecutionMode.FTQC:
        result, buffers = _run_ftqc(registry, name, args, config)
    else:
        circuit, buffers, _ = instantiate_entry(registry, name, args, config.inject_x)
        runtime = NisqRuntime(make_execution_backend(config), lambda c: compile_circuit(c, config).circuit)
        runtime.extend(flatten(circuit))
        result = runtime.submit(None, config.shots, name)
    mitigated = result.exp_val_z if config.mitigation else None
    for buf in buffers:
        buf.set_result(result.counts, mitigated)
    return buffers[0]


def _run_ftqc(registry: KernelRegistry, name: str, args: Sequence,
              config: ExecutionConfig) -> tuple[ExecutionResult, list[QRegBuffer]]:
    if config.mitigation:
        raise BackendError("error mitigation needs batched execution; it is unavailable in ftqc mode")
    if config.coupling_graph is not None or config.placement is not None or config.qubit_map is not None:
        raise BackendError("placement applies to batched execution; it is unavailable in ftqc mode")
    if config.opt_level or config.passes:
        raise BackendError("optimization passes need the whole circuit; they are unavailable in ftqc mode")
    bound, buffers, width = _bind_registers(registry, name, args)
    prelude = _injected(config.inject_x, width)
    runtime = FtqcRuntime(make_backend(config.backend, config.seed))

    def program(session) -> None:
        for inst in prelude:
            session.apply(inst)
        registry.instantiate(name, bound, mode=ExecutionMode.FTQC, measure_source=session)

    return runtime.run(program, width, config.shots), buffers


def strip_final_measurements(circuit: Circuit) -> Circuit:
    """Drop the trailing block of measurements so the circuit can be observed."""
    insts = flatten(circuit)
    cut = len(insts)
    while cut and insts[cut - 1].kind is GateKind.Measure:
        cut -= 1
    return Circuit(circuit.name, insts[:cut])


def observable_expectation(circuit: Circuit, operator, config: ExecutionConfig | None = None) -> float:
    """Estimate ``operator`` on the state ``circuit`` prepares, one compiled run per term."""
    from .hybrid.observe import observe

    config = config or ExecutionConfig()
    if ExecutionMode.parse(config.mode) is ExecutionMode.FTQC:
        raise BackendError("observable estimation runs in batched (nisq) mode")
    observation = observe(operator, strip_final_measurements(circuit))
    backend = make_execution_backend(config)
    value = observation.offset.real
    for term in observation.terms:
        compiled = compile_circuit(term.circuit, config)
        value += term.coefficient.real * backend.run(compiled.circuit, config.shots).expectation()
    return float(value)

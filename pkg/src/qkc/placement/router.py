"""Qubit placement: manual maps, shortest-path routing and SABRE.

Placed circuits address physical qubits.  Each Measure keeps the logical
classical slot it had before placement, so result bitstrings are reported
in logical order no matter where routing moved the qubits.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from ..errors import (
    DisconnectedGraph, DuplicatePhysicalIndex, GraphTooSmall, MapTooShort, PlacementError,
    UnknownPlacement,
)
from ..ir.circuit import DEFAULT_REGISTER, Circuit, Instruction, QubitRef, flatten
from ..ir.gates import GateKind
from .graph import CouplingGraph

EXTENDED_SET_SIZE = 20
EXTENDED_SET_WEIGHT = 0.5
DECAY_STEP = 0.001
DECAY_RESET_INTERVAL = 5


@dataclass
class PlacementResult:
    circuit: Circuit
    initial_map: list[int]  # logical -> physical before the first gate
    final_map: list[int]    # logical -> physical after the last gate
    added_two_qubit_gates: int


def _logical_count(insts: Sequence[Instruction]) -> int:
    return max((q.index + 1 for i in insts for q in i.qubits), default=0)


def _physical(inst: Instruction, phys: Sequence[int]) -> Instruction:
    qubits = tuple(QubitRef(DEFAULT_REGISTER, phys[q.index]) for q in inst.qubits)
    target = inst.slot if inst.kind is GateKind.Measure else None
    return Instruction(inst.kind, qubits, inst.params, target)


def _check_map(mapping: Sequence[int], n_logical: int, n_physical: int | None = None) -> list[int]:
    mapping = [int(m) for m in mapping]
    if len(mapping) < n_logical:
        raise MapTooShort(f"qubit map has {len(mapping)} entries but the circuit uses {n_logical} qubits")
    if len(set(mapping)) != len(mapping):
        raise DuplicatePhysicalIndex(f"qubit map {mapping} repeats a physical index")
    if any(m < 0 for m in mapping):
        raise PlacementError(f"qubit map {mapping} has a negative index")
    if n_physical is not None and any(m >= n_physical for m in mapping):
        raise GraphTooSmall(f"qubit map {mapping} exceeds {n_physical} physical qubits")
    return mapping


def apply_qubit_map(circuit: Circuit | Iterable[Instruction], mapping: Sequence[int]) -> Circuit:
    """Relabel logical qubit ``i`` as physical ``mapping[i]``."""
    insts = flatten(circuit) if isinstance(circuit, Circuit) else list(circuit)
    mapping = _check_map(mapping, _logical_count(insts))
    name = circuit.name if isinstance(circuit, Circuit) else "circuit"
    return Circuit(name, [_physical(i, mapping) for i in insts])


class _Layout:
    """Bidirectional logical/physical permutation over all physical qubits."""

    def __init__(self, initial: Sequence[int], n_physical: int):
        used = set(initial)
        spare = [p for p in range(n_physical) if p not in used]
        self.phys = list(initial) + spare
        self.log = [0] * n_physical
        for lq, p in enumerate(self.phys):
            self.log[p] = lq

    def swap(self, a: int, b: int) -> None:
        la, lb = self.log[a], self.log[b]
        self.log[a], self.log[b] = lb, la
        self.phys[la], self.phys[lb] = b, a

    def copy(self) -> "_Layout":
        out = _Layout.__new__(_Layout)
        out.phys, out.log = list(self.phys), list(self.log)
        return out


def _swap_gates(a: int, b: int) -> list[Instruction]:
    qa, qb = QubitRef(DEFAULT_REGISTER, a), QubitRef(DEFAULT_REGISTER, b)
    return [Instruction(GateKind.CX, (qa, qb)), Instruction(GateKind.CX, (qb, qa)),
            Instruction(GateKind.CX, (qa, qb))]


def _prepare(insts: Sequence[Instruction], graph: CouplingGraph,
             initial_map: Sequence[int] | None) -> tuple[int, list[int]]:
    n = _logical_count(insts)
    if n > graph.n_physical:
        raise GraphTooSmall(f"circuit uses {n} qubits but the graph has {graph.n_physical}")
    initial = list(range(n)) if initial_map is None else _check_map(initial_map, n, graph.n_physical)[:n]
    interacting = {q.index for i in insts if i.kind.arity == 2 for q in i.qubits}
    if not graph.connected([initial[q] for q in sorted(interacting)]):
        raise DisconnectedGraph(f"graph {graph.name!r} does not connect the qubits the circuit couples")
    return n, initial


def _route_along_path(layout: _Layout, graph: CouplingGraph, a: int, b: int,
                      out: list[Instruction]) -> int:
    """Move logical ``a`` next to logical ``b``; returns the number of CX added."""
    path = graph.shortest_path(layout.phys[a], layout.phys[b])
    if not path:
        raise DisconnectedGraph(f"no path between physical qubits {layout.phys[a]} and {layout.phys[b]}")
    added = 0
    for k in range(len(path) - 2):
        out.extend(_swap_gates(path[k], path[k + 1]))
        layout.swap(path[k], path[k + 1])
        added += 3
    return added


def route_ssp(insts: Sequence[Instruction], graph: CouplingGraph,
              initial_map: Sequence[int] | None = None) -> PlacementResult:
    """Shortest-path routing; the permutation is carried forward, never undone."""
    n, initial = _prepare(insts, graph, initial_map)
    layout = _Layout(initial, graph.n_physical)
    out: list[Instruction] = []
    added = 0
    for inst in insts:
        if inst.kind.arity == 2:
            a, b = (q.index for q in inst.qubits)
            if not graph.has_edge(layout.phys[a], layout.phys[b]):
                added += _route_along_path(layout, graph, a, b, out)
        out.append(_physical(inst, layout.phys))
    return PlacementResult(Circuit("placed", out), initial, layout.phys[:n], added)


def _sabre_run(insts: Sequence[Instruction], graph: CouplingGraph, layout: _Layout,
               out: list[Instruction] | None) -> int:
    """One SABRE traversal; mutates ``layout`` and appends to ``out`` when given."""
    n = len(insts)
    succ: list[list[int]] = [[] for _ in range(n)]
    indeg = [0] * n
    last: dict[int, int] = {}
    for i, inst in enumerate(insts):
        for q in inst.qubits:
            p = last.get(q.index)
            if p is not None and i not in succ[p]:
                succ[p].append(i)
                indeg[i] += 1
            last[q.index] = i
    front = [i for i in range(n) if indeg[i] == 0]
    dist = graph.distance
    decay = [1.0] * graph.n_physical
    added = 0
    searches = 0
    stalled = 0
    stall_limit = 3 * graph.n_physical + 10

    def qubits_of(i: int) -> list[int]:
        return [q.index for q in insts[i].qubits]

    while front:
        progressed = False
        blocked: list[int] = []
        queue = sorted(front)
        while queue:
            i = queue.pop(0)
            qs = qubits_of(i)
            if len(qs) == 2 and not graph.has_edge(layout.phys[qs[0]], layout.phys[qs[1]]):
                blocked.append(i)
                continue
            if out is not None:
                out.append(_physical(insts[i], layout.phys))
            progressed = True
            for s in succ[i]:
                indeg[s] -= 1
                if indeg[s] == 0:
                    queue.append(s)
        front = sorted(blocked)
        if progressed:
            decay = [1.0] * graph.n_physical
            stalled = 0
            continue
        if not front:
            break
        if stalled >= stall_limit:
            a, b = qubits_of(front[0])
            swaps: list[Instruction] = []
            added += _route_along_path(layout, graph, a, b, swaps)
            if out is not None:
                out.extend(swaps)
            stalled = 0
            continue
        extended = _extended_set(front, succ, indeg, insts)
        front_pairs = [qubits_of(i) for i in front]
        ext_pairs = [qubits_of(i) for i in extended]
        candidates = sorted({(min(p, v), max(p, v))
                             for pair in front_pairs for lq in pair
                             for p in [layout.phys[lq]] for v in graph.neighbors[p]})
        best, best_score = None, None
        for a, b in candidates:
            trial = layout.copy()
            trial.swap(a, b)
            score = sum(dist[trial.phys[x], trial.phys[y]] for x, y in front_pairs) / len(front_pairs)
            if ext_pairs:
                score += EXTENDED_SET_WEIGHT * sum(
                    dist[trial.phys[x], trial.phys[y]] for x, y in ext_pairs) / len(ext_pairs)
            score *= max(decay[a], decay[b])
            if best_score is None or score < best_score - 1e-12:
                best, best_score = (a, b), score
        a, b = best
        layout.swap(a, b)
        if out is not None:
            out.extend(_swap_gates(a, b))
        added += 3
        decay[a] += DECAY_STEP
        decay[b] += DECAY_STEP
        searches += 1
        stalled += 1
        if searches % DECAY_RESET_INTERVAL == 0:
            decay = [1.0] * graph.n_physical
    return added


def _extended_set(front: list[int], succ: list[list[int]], indeg: list[int],
                  insts: Sequence[Instruction]) -> list[int]:
    remaining = list(indeg)
    seen: set[int] = set()
    queue = deque(front)
    out: list[int] = []
    while queue and len(out) < EXTENDED_SET_SIZE:
        i = queue.popleft()
        for s in succ[i]:
            remaining[s] -= 1
            if remaining[s] == 0 and s not in seen:
                seen.add(s)
                if insts[s].kind.arity == 2:
                    out.append(s)
                    if len(out) >= EXTENDED_SET_SIZE:
                        break
                queue.append(s)
    return out


def route_sabre(insts: Sequence[Instruction], graph: CouplingGraph,
                initial_map: Sequence[int] | None = None) -> PlacementResult:
    """SABRE routing; without an initial map one is chosen by a forward-backward sweep."""
    n, initial = _prepare(insts, graph, initial_map)
    if initial_map is None:
        layout = _Layout(initial, graph.n_physical)
        _sabre_run(insts, graph, layout, None)
        _sabre_run(list(reversed(insts)), graph, layout, None)
        initial = layout.phys[:n]
    layout = _Layout(initial, graph.n_physical)
    out: list[Instruction] = []
    added = _sabre_run(insts, graph, layout, out)
    return PlacementResult(Circuit("placed", out), list(initial), layout.phys[:n], added)


STRATEGIES: dict[str, Callable[..., PlacementResult]] = {"ssp": route_ssp, "sabre": route_sabre}
ALIASES = {"swap-shortest-path": "ssp"}


def place(circuit: Circuit | Iterable[Instruction], graph: CouplingGraph, strategy: str = "ssp",
          initial_map: Sequence[int] | None = None) -> PlacementResult:
    """Route ``circuit`` so every two-qubit gate acts on an edge of ``graph``."""
    key = ALIASES.get(strategy, strategy)
    if key not in STRATEGIES:
        raise UnknownPlacement(f"unknown placement {strategy!r}; available: {', '.join(STRATEGIES)}")
    insts = flatten(circuit) if isinstance(circuit, Circuit) else list(circuit)
    result = STRATEGIES[key](insts, graph, initial_map)
    if isinstance(circuit, Circuit):
        result.circuit.name = circuit.name
    return result


def verify_placement(circuit: Circuit | Iterable[Instruction], graph: CouplingGraph) -> list[Instruction]:
    """Two-qubit instructions that do not sit on an edge (empty when the placement is valid)."""
    insts = flatten(circuit) if isinstance(circuit, Circuit) else list(circuit)
    return [i for i in insts if i.kind.arity == 2 and not graph.has_edge(*i.indices)]

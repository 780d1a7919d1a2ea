"""Instruction trees.

A :class:`Circuit` is an ordered list whose children are leaf
:class:`Instruction` objects or nested circuits (kernel calls keep their own
sub-tree).  Everything downstream of the frontend works on the flattened form.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from typing import Iterable, Iterator, TextIO, Union

from ..errors import InvalidInstruction
from .gates import GateKind, gate_from_name

DEFAULT_REGISTER = "q"


@dataclass(frozen=True, order=True)
class QubitRef:
    register: str
    index: int

    def __post_init__(self):
        if self.index < 0:
            raise InvalidInstruction(f"negative qubit index {self.index}")

    def __str__(self) -> str:
        return f"q{self.index}"


QubitLike = Union[QubitRef, int]


def as_qubit(q: QubitLike, register: str = DEFAULT_REGISTER) -> QubitRef:
    if isinstance(q, QubitRef):
        return q
    return QubitRef(register, int(q))


@dataclass(frozen=True)
class Instruction:
    kind: GateKind
    qubits: tuple[QubitRef, ...]
    params: tuple[float, ...] = ()
    classical_target: int | None = None

    def __post_init__(self):
        if len(self.qubits) != self.kind.arity:
            raise InvalidInstruction(
                f"{self.kind.value} takes {self.kind.arity} qubit(s), got {len(self.qubits)}")
        if len(self.params) != self.kind.n_params:
            raise InvalidInstruction(
                f"{self.kind.value} takes {self.kind.n_params} parameter(s), got {len(self.params)}")
        if len(set(self.qubits)) != len(self.qubits):
            raise InvalidInstruction(f"{self.kind.value} applied to repeated qubit {self.qubits}")
        if self.classical_target is not None and self.kind is not GateKind.Measure:
            raise InvalidInstruction("only Measure carries a classical target")

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(q.index for q in self.qubits)

    @property
    def slot(self) -> int:
        """Classical slot a Measure writes (defaults to the qubit index)."""
        return self.qubits[0].index if self.classical_target is None else self.classical_target

    def with_qubits(self, qubits: Iterable[QubitRef]) -> "Instruction":
        return Instruction(self.kind, tuple(qubits), self.params, self.classical_target)

    def __str__(self) -> str:
        return format_instruction(self)


def gate(kind: GateKind | str, *qubits: QubitLike, params: Iterable[float] = (),
         target: int | None = None, register: str = DEFAULT_REGISTER) -> Instruction:
    """Shorthand constructor: ``gate("CX", 0, 1)`` or ``gate(GateKind.Rz, 0, params=[0.3])``."""
    if isinstance(kind, str):
        found = gate_from_name(kind)
        if found is None:
            raise InvalidInstruction(f"unknown gate {kind!r}")
        kind = found
    return Instruction(kind, tuple(as_qubit(q, register) for q in qubits),
                       tuple(float(p) for p in params), target)


Node = Union[Instruction, "Circuit"]


@dataclass
class Circuit:
    name: str = "circuit"
    children: list[Node] = field(default_factory=list)

    def append(self, node: Node) -> "Circuit":
        if node is self or (isinstance(node, Circuit) and node._contains(self)):
            raise InvalidInstruction("a circuit cannot contain itself")
        self.children.append(node)
        return self

    def extend(self, nodes: Iterable[Node]) -> "Circuit":
        for n in nodes:
            self.append(n)
        return self

    def add(self, kind: GateKind | str, *qubits: QubitLike, params: Iterable[float] = (),
            target: int | None = None) -> "Circuit":
        return self.append(gate(kind, *qubits, params=params, target=target))

    def _contains(self, other: "Circuit") -> bool:
        for c in self.children:
            if c is other or (isinstance(c, Circuit) and c._contains(other)):
                return True
        return False

    def __iter__(self) -> Iterator[Instruction]:
        return iter(flatten(self))

    def __len__(self) -> int:
        return len(flatten(self))

    def instructions(self) -> list[Instruction]:
        return flatten(self)

    def qubits(self) -> set[QubitRef]:
        return {q for inst in flatten(self) for q in inst.qubits}

    def n_qubits(self) -> int:
        """One past the highest qubit index used (0 for an empty circuit)."""
        return max((q.index for q in self.qubits()), default=-1) + 1

    def copy(self) -> "Circuit":
        return Circuit(self.name, [c.copy() if isinstance(c, Circuit) else c for c in self.children])

    @classmethod
    def from_instructions(cls, insts: Iterable[Instruction], name: str = "circuit") -> "Circuit":
        return cls(name, list(insts))

    def __str__(self) -> str:
        return "\n".join(format_instruction(i) for i in flatten(self))


def flatten(circuit: Circuit) -> list[Instruction]:
    """Depth-first, left-to-right list of leaf instructions."""
    out: list[Instruction] = []
    stack: list[Iterator[Node]] = [iter(circuit.children)]
    while stack:
        for node in stack[-1]:
            if isinstance(node, Circuit):
                stack.append(iter(node.children))
                break
            out.append(node)
        else:
            stack.pop()
    return out


@dataclass
class CircuitStats:
    total_gates: int = 0
    histogram: dict[str, int] = field(default_factory=dict)
    two_qubit_count: int = 0
    depth: int = 0

    def to_dict(self) -> dict:
        return {
            "total_gates": self.total_gates,
            "histogram": dict(sorted(self.histogram.items())),
            "two_qubit_count": self.two_qubit_count,
            "depth": self.depth,
        }


def stats(circuit: Circuit | Iterable[Instruction]) -> CircuitStats:
    insts = flatten(circuit) if isinstance(circuit, Circuit) else list(circuit)
    hist: dict[str, int] = {}
    level: dict[QubitRef, int] = {}
    depth = 0
    two = 0
    for inst in insts:
        hist[inst.kind.value] = hist.get(inst.kind.value, 0) + 1
        if inst.kind.arity == 2:
            two += 1
        d = 1 + max(level.get(q, 0) for q in inst.qubits)
        for q in inst.qubits:
            level[q] = d
        depth = max(depth, d)
    return CircuitStats(len(insts), hist, two, depth)


_PRINT_NAME = {GateKind.CX: "CNOT"}


def _fmt_param(p: float) -> str:
    return format(p, ".12g")


def format_instruction(inst: Instruction) -> str:
    name = _PRINT_NAME.get(inst.kind, inst.kind.value)
    if inst.params:
        name += "(" + ",".join(_fmt_param(p) for p in inst.params) + ")"
    return f"{name} " + ",".join(str(q) for q in inst.qubits)


def print_circuit(circuit: Circuit | Iterable[Instruction], sink: TextIO | None = None) -> None:
    """Write one instruction per line, e.g. ``CNOT q0,q1`` or ``Rz(0.5) q2``."""
    sink = sys.stdout if sink is None else sink
    insts = flatten(circuit) if isinstance(circuit, Circuit) else circuit
    for inst in insts:
        sink.write(format_instruction(inst) + "\n")

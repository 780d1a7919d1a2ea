"""Built-in optimization passes over flat instruction lists.

Every pass is a pure function ``list[Instruction] -> list[Instruction]`` that
preserves the unitary up to global phase and never adds gates.  Measure and
Reset are treated as opaque: nothing commutes or cancels across them.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

from ..ir.circuit import Instruction, QubitRef
from ..ir.gates import DIAGONAL, SYMMETRIC, GateKind, gate_matrix
from ..ir.synthesis import single_qubit_gates
from ..ir.transforms import inverse

ANGLE_TOL = 1e-12
TWO_PI = 2.0 * math.pi

# angle period of each rotation kind (up to global phase); CRz(2 pi) is a CZ-like phase
_PERIOD = {
    GateKind.Rx: TWO_PI, GateKind.Ry: TWO_PI, GateKind.Rz: TWO_PI, GateKind.U1: TWO_PI,
    GateKind.CPhase: TWO_PI, GateKind.CRz: 2 * TWO_PI,
}


def reduce_angle(angle: float, period: float = TWO_PI) -> float:
    """Map ``angle`` into (-period/2, period/2]."""
    a = math.fmod(angle, period)
    if a <= -period / 2:
        a += period
    elif a > period / 2:
        a -= period
    return a


def is_zero_rotation(inst: Instruction) -> bool:
    period = _PERIOD.get(inst.kind)
    return period is not None and abs(reduce_angle(inst.params[0], period)) < ANGLE_TOL


def _same_instruction(a: Instruction, b: Instruction) -> bool:
    if a.kind is not b.kind:
        return False
    if a.qubits != b.qubits and not (a.kind in SYMMETRIC and set(a.qubits) == set(b.qubits)):
        return False
    period = _PERIOD.get(a.kind)
    for x, y in zip(a.params, b.params):
        diff = x - y if period is None else reduce_angle(x - y, period)
        if abs(diff) > ANGLE_TOL:
            return False
    return True


def _is_inverse_pair(first: Instruction, second: Instruction) -> bool:
    if not (first.kind.is_unitary and second.kind.is_unitary):
        return False
    if set(first.qubits) != set(second.qubits):
        return False
    return _same_instruction(inverse(first), second)


# --- circuit-optimizer ---------------------------------------------------------

def circuit_optimizer(insts: Sequence[Instruction]) -> list[Instruction]:
    """Cancel adjacent inverse pairs and drop zero-angle rotations, to a fixed point.

    Two instructions are adjacent when no instruction between them touches
    any of their qubits.  A per-qubit stack of live positions makes each
    cancellation expose the next candidate pair immediately.
    """
    out: list[Instruction | None] = []
    last: dict[QubitRef, list[int]] = {}
    for inst in insts:
        if is_zero_rotation(inst):
            continue
        tops = {last[q][-1] if last.get(q) else -1 for q in inst.qubits}
        if len(tops) == 1:
            p = tops.pop()
            if p >= 0 and _is_inverse_pair(out[p], inst):
                for q in inst.qubits:
                    last[q].pop()
                out[p] = None
                continue
        for q in inst.qubits:
            last.setdefault(q, []).append(len(out))
        out.append(inst)
    return [i for i in out if i is not None]


# --- rotation-folding -----------------------------------------------------------

_Z_TYPE = {GateKind.Rz, GateKind.U1}


def _axis(inst: Instruction) -> str | None:
    if inst.kind in _Z_TYPE:
        return "z"
    if inst.kind is GateKind.Rx:
        return "x"
    if inst.kind is GateKind.Ry:
        return "y"
    if inst.kind in (GateKind.CPhase, GateKind.CRz):
        return inst.kind.value
    return None


def _commutes_on(axis: str, q: QubitRef, other: Instruction) -> bool:
    """Whether a rotation about ``axis`` acting on ``q`` commutes with ``other``."""
    k = other.kind
    if axis in ("z", GateKind.CPhase.value, GateKind.CRz.value):
        if k in DIAGONAL:
            return True
        return k is GateKind.CX and other.qubits[0] == q
    if axis == "x":
        if k in (GateKind.Rx, GateKind.X):
            return True
        return k is GateKind.CX and other.qubits[1] == q
    if axis == "y":
        return k in (GateKind.Ry, GateKind.Y)
    return False


def _mergeable(p: Instruction, g: Instruction) -> bool:
    if _axis(p) != _axis(g):
        return False
    if g.kind is GateKind.CRz:
        return p.qubits == g.qubits
    if g.kind is GateKind.CPhase:
        return set(p.qubits) == set(g.qubits)
    return p.qubits == g.qubits


def _merged(p: Instruction, g: Instruction) -> Instruction:
    kind = g.kind
    period = _PERIOD[kind]
    # Rz and U1 differ only by a global phase, so either spelling may absorb the other
    angle = reduce_angle(p.params[0] + g.params[0], period)
    return Instruction(kind, g.qubits, (angle,))


def rotation_folding(insts: Sequence[Instruction]) -> list[Instruction]:
    """Merge same-axis rotations separated only by gates they commute with.

    The merged rotation takes the position of the later one; rotations whose
    merged angle vanishes are deleted.
    """
    current = list(insts)
    while True:
        out: list[Instruction | None] = []
        changed = False
        for g in current:
            axis = _axis(g)
            if axis is not None:
                p_idx = _find_partner(out, g, axis)
                if p_idx is not None:
                    g = _merged(out[p_idx], g)
                    out[p_idx] = None
                    changed = True
                    if is_zero_rotation(g):
                        continue
            out.append(g)
        current = [i for i in out if i is not None]
        if not changed:
            return current


def _find_partner(out: list[Instruction | None], g: Instruction, axis: str) -> int | None:
    qs = set(g.qubits)
    for idx in range(len(out) - 1, -1, -1):
        h = out[idx]
        if h is None or qs.isdisjoint(h.qubits):
            continue
        if _mergeable(h, g):
            return idx
        if not all(_commutes_on(axis, q, h) for q in qs.intersection(h.qubits)):
            return None
    return None


# --- single-qubit-gate-merging ----------------------------------------------------

def single_qubit_gate_merging(insts: Sequence[Instruction]) -> list[Instruction]:
    """Replace each maximal run of >= 2 single-qubit gates on a qubit by at most one gate."""
    runs: dict[QubitRef, list[int]] = {}
    replace: dict[int, list[Instruction]] = {}

    def close(q: QubitRef) -> None:
        run = runs.pop(q, [])
        if len(run) < 2:
            return
        u = np.eye(2, dtype=complex)
        for idx in run:
            u = gate_matrix(insts[idx].kind, insts[idx].params) @ u
        for idx in run[:-1]:
            replace[idx] = []
        replace[run[-1]] = single_qubit_gates(u, q)

    for idx, inst in enumerate(insts):
        if inst.kind.arity == 1 and inst.kind.is_unitary:
            runs.setdefault(inst.qubits[0], []).append(idx)
        else:
            for q in inst.qubits:
                close(q)
    for q in list(runs):
        close(q)
    out: list[Instruction] = []
    for idx, inst in enumerate(insts):
        out.extend(replace.get(idx, [inst]))
    return out


BUILTIN_PASSES: dict[str, Callable[[Sequence[Instruction]], list[Instruction]]] = {
    "circuit-optimizer": circuit_optimizer,
    "rotation-folding": rotation_folding,
    "single-qubit-gate-merging": single_qubit_gate_merging,
}

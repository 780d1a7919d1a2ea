"""Adjoint and controlled versions of circuits.

Controlled gates are produced without adding a multi-control gate kind: a
controlled two-qubit gate is first rewritten exactly into CX plus single-qubit
gates, and every resulting gate is then controlled individually (a controlled
CX becomes the standard 6-CX Toffoli network).
"""

from __future__ import annotations

import math

from ..errors import AdjointOfNonUnitary, ControlOfNonUnitary
from .circuit import Circuit, Instruction, QubitRef, flatten
from .gates import SELF_INVERSE, GateKind, gate_matrix
from .synthesis import controlled_single_qubit

_INVERSE_KIND = {
    GateKind.S: GateKind.Sdg,
    GateKind.Sdg: GateKind.S,
    GateKind.T: GateKind.Tdg,
    GateKind.Tdg: GateKind.T,
}
_NEGATE = {GateKind.Rx, GateKind.Ry, GateKind.Rz, GateKind.U1, GateKind.CPhase, GateKind.CRz}


def inverse(inst: Instruction) -> Instruction:
    """The inverse of a single unitary instruction."""
    k = inst.kind
    if not k.is_unitary:
        raise AdjointOfNonUnitary(f"{k.value} has no adjoint")
    if k in SELF_INVERSE:
        return inst
    if k in _INVERSE_KIND:
        return Instruction(_INVERSE_KIND[k], inst.qubits)
    if k in _NEGATE:
        return Instruction(k, inst.qubits, (-inst.params[0],))
    if k is GateKind.U3:
        theta, phi, lam = inst.params
        return Instruction(k, inst.qubits, (-theta, -lam, -phi))
    raise AdjointOfNonUnitary(f"no inverse rule for {k.value}")


def adjoint(circuit: Circuit) -> Circuit:
    """Reverse the flattened instruction list and invert every gate."""
    insts = flatten(circuit)
    for inst in insts:
        if not inst.kind.is_unitary:
            raise AdjointOfNonUnitary(f"cannot take the adjoint of a circuit containing {inst.kind.value}")
    return Circuit(f"{circuit.name}_adjoint", [inverse(i) for i in reversed(insts)])


def _g(kind: GateKind, *qubits: QubitRef, params: tuple[float, ...] = ()) -> Instruction:
    return Instruction(kind, tuple(qubits), params)


def toffoli(a: QubitRef, b: QubitRef, c: QubitRef) -> list[Instruction]:
    """Exact CCX(a, b -> c) using 6 CX, 7 T-type and 2 H gates."""
    H, CX, T, Tdg = GateKind.H, GateKind.CX, GateKind.T, GateKind.Tdg
    return [
        _g(H, c), _g(CX, b, c), _g(Tdg, c), _g(CX, a, c), _g(T, c), _g(CX, b, c),
        _g(Tdg, c), _g(CX, a, c), _g(T, b), _g(T, c), _g(H, c), _g(CX, a, b),
        _g(T, a), _g(Tdg, b), _g(CX, a, b),
    ]


def two_qubit_to_cx(inst: Instruction) -> list[Instruction]:
    """Rewrite a two-qubit gate exactly (including phase) into CX and 1-qubit gates."""
    k = inst.kind
    a, b = inst.qubits
    if k is GateKind.CX:
        return [inst]
    if k is GateKind.CZ:
        return [_g(GateKind.H, b), _g(GateKind.CX, a, b), _g(GateKind.H, b)]
    if k is GateKind.CY:
        return [_g(GateKind.Sdg, b), _g(GateKind.CX, a, b), _g(GateKind.S, b)]
    if k is GateKind.CPhase:
        lam = inst.params[0]
        return [_g(GateKind.U1, a, params=(lam / 2,)), _g(GateKind.CX, a, b),
                _g(GateKind.U1, b, params=(-lam / 2,)), _g(GateKind.CX, a, b),
                _g(GateKind.U1, b, params=(lam / 2,))]
    if k is GateKind.CRz:
        theta = inst.params[0]
        return [_g(GateKind.Rz, b, params=(theta / 2,)), _g(GateKind.CX, a, b),
                _g(GateKind.Rz, b, params=(-theta / 2,)), _g(GateKind.CX, a, b)]
    if k is GateKind.Swap:
        return [_g(GateKind.CX, a, b), _g(GateKind.CX, b, a), _g(GateKind.CX, a, b)]
    if k is GateKind.CH:
        return controlled_single_qubit(gate_matrix(GateKind.H), a, b)
    raise ControlOfNonUnitary(f"{k.value} is not a two-qubit unitary")


_PHASE_ANGLE = {
    GateKind.Z: math.pi,
    GateKind.S: math.pi / 2,
    GateKind.Sdg: -math.pi / 2,
    GateKind.T: math.pi / 4,
    GateKind.Tdg: -math.pi / 4,
}
_DIRECT = {GateKind.X: GateKind.CX, GateKind.Y: GateKind.CY, GateKind.Z: GateKind.CZ,
           GateKind.H: GateKind.CH}


def control_instruction(inst: Instruction, ctrl: QubitRef) -> list[Instruction]:
    """Exact controlled version of one instruction."""
    k = inst.kind
    if not k.is_unitary:
        raise ControlOfNonUnitary(f"cannot control {k.value}")
    if ctrl in inst.qubits:
        raise ControlOfNonUnitary(f"control qubit {ctrl} is also a target of {inst}")
    if k.arity == 1:
        (t,) = inst.qubits
        if k in _DIRECT:
            return [_g(_DIRECT[k], ctrl, t)]
        if k in _PHASE_ANGLE:
            return [_g(GateKind.CPhase, ctrl, t, params=(_PHASE_ANGLE[k],))]
        if k is GateKind.U1:
            return [_g(GateKind.CPhase, ctrl, t, params=inst.params)]
        if k is GateKind.Rz:
            return [_g(GateKind.CRz, ctrl, t, params=inst.params)]
        return controlled_single_qubit(gate_matrix(k, inst.params), ctrl, t)
    out: list[Instruction] = []
    for sub in two_qubit_to_cx(inst):
        if sub.kind is GateKind.CX:
            out.extend(toffoli(ctrl, *sub.qubits))
        else:
            out.extend(control_instruction(sub, ctrl))
    return out


def controlled(circuit: Circuit, ctrl: QubitRef) -> Circuit:
    """Circuit acting as ``|0><0| x I + |1><1| x U`` with ``ctrl`` as the control."""
    insts = flatten(circuit)
    out: list[Instruction] = []
    for inst in insts:
        if not inst.kind.is_unitary:
            raise ControlOfNonUnitary(f"cannot control a circuit containing {inst.kind.value}")
        out.extend(control_instruction(inst, ctrl))
    return Circuit(f"{circuit.name}_ctrl", out)

"""First-order Trotter circuits for exp(-i theta H)."""

from __future__ import annotations

import math
from typing import Sequence

from ..errors import ComplexCoefficient, RangeError
from ..ir.circuit import Circuit, Instruction, QubitRef
from ..ir.gates import GateKind
from .pauli import PauliOperator

IMAG_TOL = 1e-9


def _basis_change(axis: str, q: QubitRef, inverse: bool) -> list[Instruction]:
    if axis == "X":
        return [Instruction(GateKind.H, (q,))]
    if axis == "Y":
        angle = -math.pi / 2 if inverse else math.pi / 2
        return [Instruction(GateKind.Rx, (q,), (angle,))]
    return []


def pauli_rotation(term, angle: float, qubits: Sequence[QubitRef]) -> list[Instruction]:
    """exp(-i angle/2 P) for a Pauli string ``term`` of (index, axis) pairs."""
    if not term:
        return []
    refs = [qubits[i] for i, _ in term]
    pre = [g for (i, axis), q in zip(term, refs) for g in _basis_change(axis, q, False)]
    post = [g for (i, axis), q in zip(term, refs) for g in _basis_change(axis, q, True)]
    ladder = [Instruction(GateKind.CX, (refs[k], refs[k + 1])) for k in range(len(refs) - 1)]
    rot = [Instruction(GateKind.Rz, (refs[-1],), (angle,))]
    return pre + ladder + rot + ladder[::-1] + post


def exp_i_theta_instructions(op: PauliOperator, theta: float,
                             qubits: Sequence[QubitRef]) -> list[Instruction]:
    """Single Trotter step of exp(-i theta op); exact when all terms commute."""
    out: list[Instruction] = []
    for term, c in op:
        if abs(c.imag) > IMAG_TOL:
            raise ComplexCoefficient(f"term {term} has complex coefficient {c}")
        if term and term[-1][0] >= len(qubits):
            raise RangeError(f"operator acts on qubit {term[-1][0]} but the register has {len(qubits)}")
        out += pauli_rotation(term, 2.0 * theta * c.real, qubits)
    return out


def exp_i_theta(q, theta: float, op: PauliOperator) -> Circuit:
    """Trotter circuit on register ``q`` (a qubit count or a register object)."""
    from ..frontend.interpreter import as_qreg
    return Circuit("exp_i_theta", exp_i_theta_instructions(op, theta, as_qreg(q).qubits()))

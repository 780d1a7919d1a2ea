"""Built-in kernels available to every kernel body without a definition.

``qft``/``iqft`` act on ``n`` qubits starting at ``start`` of a register;
``exp_i_theta`` appends the first-order Trotter circuit of ``exp(-i theta H)``.
"""

from __future__ import annotations

import math
from typing import Sequence

from ..errors import ArgumentMismatch, RangeError
from ..ir.circuit import Circuit, Instruction, QubitRef
from ..ir.gates import GateKind
from ..ir.transforms import adjoint


def qft_instructions(qubits: Sequence[QubitRef], swap: bool = True) -> list[Instruction]:
    """QFT with ``qubits[0]`` as the least-significant bit."""
    n = len(qubits)
    out: list[Instruction] = []
    for j in range(n - 1, -1, -1):
        out.append(Instruction(GateKind.H, (qubits[j],)))
        for k in range(j - 1, -1, -1):
            out.append(Instruction(GateKind.CPhase, (qubits[k], qubits[j]), (math.pi / 2 ** (j - k),)))
    if swap:
        for i in range(n // 2):
            out.append(Instruction(GateKind.Swap, (qubits[i], qubits[n - 1 - i])))
    return out


def iqft_instructions(qubits: Sequence[QubitRef], swap: bool = True) -> list[Instruction]:
    return adjoint(Circuit("qft", qft_instructions(qubits, swap))).children


def _qft_range(args: list, name: str):
    from .interpreter import as_qreg
    if not 1 <= len(args) <= 4:
        raise ArgumentMismatch(f"{name}(q, start, n, swap) takes 1 to 4 arguments, got {len(args)}")
    reg = as_qreg(args[0])
    start = int(args[1]) if len(args) > 1 else 0
    n = int(args[2]) if len(args) > 2 else reg.size - start
    swap = bool(args[3]) if len(args) > 3 else True
    if start < 0 or n < 0 or start + n > reg.size:
        raise RangeError(f"{name}: qubits [{start}, {start + n}) outside a register of size {reg.size}")
    return [reg[start + i] for i in range(n)], swap


def qft(interp, args: list, line: int):
    qubits, swap = _qft_range(args, "qft")
    return "qft", qft_instructions(qubits, swap)


def iqft(interp, args: list, line: int):
    qubits, swap = _qft_range(args, "iqft")
    return "iqft", iqft_instructions(qubits, swap)


def exp_i_theta(interp, args: list, line: int):
    from ..hybrid.pauli import PauliOperator
    from ..hybrid.trotter import exp_i_theta_instructions
    from .interpreter import as_qreg
    if len(args) != 3 or not isinstance(args[2], PauliOperator):
        raise ArgumentMismatch("exp_i_theta(q, theta, op) expects a register, an angle and an operator")
    reg = as_qreg(args[0])
    return "exp_i_theta", exp_i_theta_instructions(args[2], float(args[1]), reg.qubits())


BUILTINS = {"qft": qft, "iqft": iqft, "exp_i_theta": exp_i_theta}

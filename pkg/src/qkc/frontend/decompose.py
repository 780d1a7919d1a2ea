"""Unitary synthesis by two-level (Givens) elimination.

The basis is visited in Gray-code order so every pair of neighbouring indices
differs in exactly one bit.  Each two-level rotation therefore acts as a
single-qubit gate on that bit, controlled on the values of all other bits,
which is then expanded exactly into CX and single-qubit gates.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import DimensionMismatch, NotUnitary, TooManyQubitsForSynthesis
from ..ir.circuit import Circuit, Instruction, QubitRef
from ..ir.gates import GateKind
from ..ir.synthesis import (
    is_identity_up_to_phase, multi_controlled_single_qubit, single_qubit_gates,
)
from ..ir.transforms import toffoli

MAX_SYNTHESIS_QUBITS = 3
_X = np.array([[0, 1], [1, 0]], dtype=complex)


@dataclass(frozen=True)
class TwoLevelOp:
    """``matrix`` acting on basis states ``low`` and ``low | (1 << bit)``."""
    bit: int
    low: int
    matrix: np.ndarray


def gray_order(n_bits: int) -> list[int]:
    return [i ^ (i >> 1) for i in range(2 ** n_bits)]


def two_level_decomposition(u: np.ndarray, atol: float = 1e-12) -> list[TwoLevelOp]:
    """Return ops in application order whose product equals ``u`` up to global phase."""
    d = u.shape[0]
    n_bits = d.bit_length() - 1
    g = gray_order(n_bits)
    w = u[np.ix_(g, g)].astype(complex)
    eliminations: list[tuple[int, np.ndarray]] = []  # (gray position r-1, 2x2 G) with G applied on rows
    for c in range(d - 1):
        for r in range(d - 1, c, -1):
            a, b = w[r - 1, c], w[r, c]
            if abs(b) <= atol:
                continue
            norm = np.hypot(abs(a), abs(b))
            gmat = np.array([[np.conj(a), np.conj(b)], [-b, a]], dtype=complex) / norm
            w[[r - 1, r], :] = gmat @ w[[r - 1, r], :]
            eliminations.append((r - 1, gmat))
    # w is now diagonal; peel the phases into two-level diagonal ops (global phase dropped)
    phases = np.diag(w).copy()
    diag_ops: list[tuple[int, np.ndarray]] = []
    for i in range(d - 1, 0, -1):
        ratio = phases[i] / phases[0]
        if abs(ratio - 1.0) > atol:
            diag_ops.append((i - 1, np.diag([1.0, ratio]).astype(complex)))
    # u ~ G_1^dag ... G_k^dag D : apply D first, then G_k^dag, ..., G_1^dag
    # (the diagonal part is exact only up to the phase of w[0,0])
    seq: list[tuple[int, np.ndarray]] = list(diag_ops)
    seq += [(pos, gm.conj().T) for pos, gm in reversed(eliminations)]
    # diagonal ops commute with each other: fold one into the first rotation on the same pair
    if diag_ops and len(seq) > len(diag_ops):
        first_pos = seq[len(diag_ops)][0]
        for k, (pos, m) in enumerate(diag_ops):
            if pos == first_pos:
                nxt = seq[len(diag_ops)]
                seq[len(diag_ops)] = (pos, nxt[1] @ m)
                del seq[k]
                break
    ops: list[TwoLevelOp] = []
    for pos, m in seq:
        i0, i1 = g[pos], g[pos + 1]
        diff = i0 ^ i1
        bit = diff.bit_length() - 1
        if i0 & diff:  # i0 has the bit set: reorder the local basis
            i0, i1 = i1, i0
            m = _X @ m @ _X
        ops.append(TwoLevelOp(bit, i0, m))
    return [op for op in ops if not np.allclose(op.matrix, np.eye(2), atol=1e-14)]


def _op_gates(op: TwoLevelOp, targets: Sequence[QubitRef]) -> list[Instruction]:
    n = len(targets)
    target = targets[op.bit]
    controls = [targets[b] for b in range(n) if b != op.bit]
    flips = [targets[b] for b in range(n) if b != op.bit and not (op.low >> b) & 1]
    out = [Instruction(GateKind.X, (q,)) for q in flips]
    if len(controls) == 2 and np.allclose(op.matrix, _X, atol=1e-12):
        out += toffoli(controls[0], controls[1], target)
    elif len(controls) == 1 and np.allclose(op.matrix, _X, atol=1e-12):
        out.append(Instruction(GateKind.CX, (controls[0], target)))
    else:
        out += multi_controlled_single_qubit(op.matrix, controls, target)
    out += [Instruction(GateKind.X, (q,)) for q in flips]
    return out


_cache: dict[tuple[bytes, int], list[TwoLevelOp]] = {}
_cache_lock = threading.Lock()
_CACHE_LIMIT = 256


def decompose_unitary(u, targets: Sequence[QubitRef], tolerance: float = 1e-9,
                      name: str = "decompose") -> Circuit:
    """Synthesize ``u`` on ``targets``; bit ``b`` of the matrix index is ``targets[b]``."""
    u = np.asarray(u, dtype=complex)
    n = len(targets)
    if n > MAX_SYNTHESIS_QUBITS:
        raise TooManyQubitsForSynthesis(
            f"synthesis supports at most {MAX_SYNTHESIS_QUBITS} qubits, got {n}")
    if u.ndim != 2 or u.shape != (2 ** n, 2 ** n):
        raise DimensionMismatch(f"matrix of shape {u.shape} does not act on {n} qubit(s)")
    if not np.all(np.isfinite(u)) or not np.allclose(u @ u.conj().T, np.eye(2 ** n), atol=tolerance):
        raise NotUnitary("matrix is not unitary within tolerance")
    if n == 0:
        return Circuit(name)
    key = (u.tobytes(), n)
    with _cache_lock:
        ops = _cache.get(key)
    if ops is None:
        ops = two_level_decomposition(u)
        with _cache_lock:
            if len(_cache) >= _CACHE_LIMIT:
                _cache.clear()
            _cache[key] = ops
    circuit = Circuit(name)
    if n == 1 and ops:
        if not is_identity_up_to_phase(u):
            circuit.extend(single_qubit_gates(u, targets[0]))
        return circuit
    for op in ops:
        circuit.extend(_op_gates(op, targets))
    return circuit

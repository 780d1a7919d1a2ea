"""Dense unitary reconstruction and the shared gate-application kernel.

States are handled as batched tensors of shape ``(B, 2, ..., 2)``.  Qubit 0 is
the least-significant bit of the flattened basis index, so qubit ``q`` lives on
tensor axis ``1 + (n - 1 - q)``.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from ..errors import NonUnitaryInstruction, TooManyQubits
from .circuit import Circuit, Instruction, flatten
from .gates import gate_matrix

MAX_UNITARY_QUBITS = 10


def qubit_axis(q: int, n: int) -> int:
    return 1 + (n - 1 - q)


def apply_matrix(state: np.ndarray, mat: np.ndarray, qubits: Sequence[int], n: int) -> np.ndarray:
    """Apply a local unitary to ``qubits`` of a batched state; returns a new array."""
    k = len(qubits)
    axes = [qubit_axis(q, n) for q in qubits]
    front = list(range(1, 1 + k))
    moved = np.moveaxis(state, axes, front)
    shape = moved.shape
    flat = moved.reshape(shape[0], 2 ** k, -1)
    out = np.matmul(mat, flat).reshape(shape)
    return np.moveaxis(out, front, axes)


def apply_instruction(state: np.ndarray, inst: Instruction, n: int,
                      index_map: dict[int, int] | None = None) -> np.ndarray:
    if not inst.kind.is_unitary:
        raise NonUnitaryInstruction(f"{inst.kind.value} is not unitary")
    qs = inst.indices if index_map is None else tuple(index_map[i] for i in inst.indices)
    return apply_matrix(state, gate_matrix(inst.kind, inst.params), qs, n)


def to_unitary(circuit: Circuit | Iterable[Instruction], n_qubits: int) -> np.ndarray:
    """Matrix of a measurement-free circuit; column ``j`` is the image of basis state ``j``."""
    if n_qubits > MAX_UNITARY_QUBITS:
        raise TooManyQubits(f"to_unitary supports at most {MAX_UNITARY_QUBITS} qubits, got {n_qubits}")
    insts = flatten(circuit) if isinstance(circuit, Circuit) else list(circuit)
    dim = 2 ** n_qubits
    for inst in insts:
        if not inst.kind.is_unitary:
            raise NonUnitaryInstruction(f"{inst.kind.value} has no unitary")
        if max(inst.indices) >= n_qubits:
            raise TooManyQubits(f"{inst} touches a qubit outside the {n_qubits}-qubit space")
    state = np.eye(dim, dtype=complex).reshape((dim,) + (2,) * n_qubits)
    for inst in insts:
        state = apply_instruction(state, inst, n_qubits)
    return state.reshape(dim, dim).T


def equal_up_to_phase(a: np.ndarray, b: np.ndarray, atol: float = 1e-9) -> bool:
    """True when ``a = e^{i phi} b`` elementwise within ``atol``."""
    if a.shape != b.shape:
        return False
    idx = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    if abs(b[idx]) < atol:
        return bool(np.allclose(a, b, atol=atol))
    phase = a[idx] / b[idx]
    if abs(abs(phase) - 1.0) > 1e-6:
        return False
    return bool(np.allclose(a, phase * b, atol=atol))


def phase_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Max elementwise deviation between ``a`` and the best global-phase rotation of ``b``."""
    inner = np.vdot(b, a)
    phase = inner / abs(inner) if abs(inner) > 1e-300 else 1.0
    return float(np.max(np.abs(a - phase * b)))

"""Gate kinds and their matrices.

This table is the single source of gate semantics: the unitary builder and the
statevector simulator both read matrices from here.

Local matrix convention: for a gate acting on ``(q_a, q_b)`` the 4x4 matrix is
written in the basis ``|q_a q_b>`` with ``q_a`` the more significant bit, so
``CX(control, target)`` has the familiar block form.
"""

from __future__ import annotations

import cmath
import math
from enum import Enum

import numpy as np


class GateKind(Enum):
    H = "H"
    X = "X"
    Y = "Y"
    Z = "Z"
    S = "S"
    Sdg = "Sdg"
    T = "T"
    Tdg = "Tdg"
    Rx = "Rx"
    Ry = "Ry"
    Rz = "Rz"
    U1 = "U1"
    U3 = "U3"
    CX = "CX"
    CY = "CY"
    CZ = "CZ"
    CH = "CH"
    CPhase = "CPhase"
    CRz = "CRz"
    Swap = "Swap"
    Measure = "Measure"
    Reset = "Reset"

    @property
    def arity(self) -> int:
        return 2 if self in TWO_QUBIT else 1

    @property
    def n_params(self) -> int:
        if self is GateKind.U3:
            return 3
        return 1 if self in ROTATIONS else 0

    @property
    def is_unitary(self) -> bool:
        return self not in (GateKind.Measure, GateKind.Reset)


TWO_QUBIT = frozenset({
    GateKind.CX, GateKind.CY, GateKind.CZ, GateKind.CH,
    GateKind.CPhase, GateKind.CRz, GateKind.Swap,
})
ROTATIONS = frozenset({
    GateKind.Rx, GateKind.Ry, GateKind.Rz, GateKind.U1, GateKind.CPhase, GateKind.CRz,
})
SELF_INVERSE = frozenset({
    GateKind.H, GateKind.X, GateKind.Y, GateKind.Z,
    GateKind.CX, GateKind.CY, GateKind.CZ, GateKind.CH, GateKind.Swap,
})
# gates diagonal in the computational basis on every qubit they touch
DIAGONAL = frozenset({
    GateKind.Z, GateKind.S, GateKind.Sdg, GateKind.T, GateKind.Tdg,
    GateKind.Rz, GateKind.U1, GateKind.CZ, GateKind.CPhase, GateKind.CRz,
})
# symmetric under exchange of their two qubits
SYMMETRIC = frozenset({GateKind.CZ, GateKind.CPhase, GateKind.Swap})

_ALIASES = {
    "h": GateKind.H, "x": GateKind.X, "y": GateKind.Y, "z": GateKind.Z,
    "s": GateKind.S, "sdg": GateKind.Sdg, "t": GateKind.T, "tdg": GateKind.Tdg,
    "rx": GateKind.Rx, "ry": GateKind.Ry, "rz": GateKind.Rz,
    "u1": GateKind.U1, "u3": GateKind.U3,
    "cx": GateKind.CX, "cnot": GateKind.CX, "cy": GateKind.CY, "cz": GateKind.CZ,
    "ch": GateKind.CH, "cphase": GateKind.CPhase, "crz": GateKind.CRz,
    "swap": GateKind.Swap, "measure": GateKind.Measure, "mz": GateKind.Measure,
    "reset": GateKind.Reset,
}


def gate_from_name(name: str) -> GateKind | None:
    """Case-insensitive lookup of a gate spelling (``CNOT`` and ``CX`` both work)."""
    return _ALIASES.get(name.lower())


_SQ2 = 1.0 / math.sqrt(2.0)
_FIXED = {
    GateKind.H: np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    GateKind.Z: np.array([[1, 0], [0, -1]], dtype=complex),
    GateKind.S: np.array([[1, 0], [0, 1j]], dtype=complex),
    GateKind.Sdg: np.array([[1, 0], [0, -1j]], dtype=complex),
    GateKind.T: np.array([[1, 0], [0, cmath.exp(1j * math.pi / 4)]], dtype=complex),
    GateKind.Tdg: np.array([[1, 0], [0, cmath.exp(-1j * math.pi / 4)]], dtype=complex),
    GateKind.Swap: np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex),
}


def _controlled(u: np.ndarray) -> np.ndarray:
    m = np.eye(4, dtype=complex)
    m[2:, 2:] = u
    return m


def rx(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def ry(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rz(theta: float) -> np.ndarray:
    return np.array([[cmath.exp(-0.5j * theta), 0], [0, cmath.exp(0.5j * theta)]], dtype=complex)


def u1(lam: float) -> np.ndarray:
    return np.array([[1, 0], [0, cmath.exp(1j * lam)]], dtype=complex)


def u3(theta: float, phi: float, lam: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([
        [c, -cmath.exp(1j * lam) * s],
        [cmath.exp(1j * phi) * s, cmath.exp(1j * (phi + lam)) * c],
    ], dtype=complex)


def gate_matrix(kind: GateKind, params: tuple[float, ...] = ()) -> np.ndarray:
    """Return the local unitary of ``kind`` (2x2 or 4x4)."""
    if kind in _FIXED:
        return _FIXED[kind]
    if kind is GateKind.Rx:
        return rx(params[0])
    if kind is GateKind.Ry:
        return ry(params[0])
    if kind is GateKind.Rz:
        return rz(params[0])
    if kind is GateKind.U1:
        return u1(params[0])
    if kind is GateKind.U3:
        return u3(*params)
    if kind is GateKind.CX:
        return _controlled(_FIXED[GateKind.X])
    if kind is GateKind.CY:
        return _controlled(_FIXED[GateKind.Y])
    if kind is GateKind.CZ:
        return _controlled(_FIXED[GateKind.Z])
    if kind is GateKind.CH:
        return _controlled(_FIXED[GateKind.H])
    if kind is GateKind.CPhase:
        return _controlled(u1(params[0]))
    if kind is GateKind.CRz:
        return _controlled(rz(params[0]))
    raise ValueError(f"{kind.value} has no unitary matrix")


PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": _FIXED[GateKind.X],
    "Y": _FIXED[GateKind.Y],
    "Z": _FIXED[GateKind.Z],
}

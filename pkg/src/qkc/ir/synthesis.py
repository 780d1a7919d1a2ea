"""Small exact synthesis routines for single-qubit and controlled unitaries."""

from __future__ import annotations

import cmath
import math

import numpy as np

from .circuit import Instruction, QubitRef
from .gates import GateKind

ANGLE_EPS = 1e-12


def zyz_angles(u: np.ndarray) -> tuple[float, float, float, float]:
    """Return ``(alpha, beta, gamma, delta)`` with ``u = e^{i alpha} Rz(beta) Ry(gamma) Rz(delta)``."""
    u = np.asarray(u, dtype=complex)
    alpha = cmath.phase(np.linalg.det(u)) / 2.0
    v = u * cmath.exp(-1j * alpha)
    gamma = 2.0 * math.atan2(abs(v[1, 0]), abs(v[0, 0]))
    tol = 1e-12
    if abs(v[0, 0]) > tol and abs(v[1, 0]) > tol:
        plus = 2.0 * cmath.phase(v[1, 1])
        minus = 2.0 * cmath.phase(v[1, 0])
    elif abs(v[1, 0]) <= tol:
        plus, minus = 2.0 * cmath.phase(v[1, 1]), 0.0
    else:
        plus, minus = 0.0, 2.0 * cmath.phase(v[1, 0])
    beta = (plus + minus) / 2.0
    delta = (plus - minus) / 2.0
    return alpha, beta, gamma, delta


def u3_angles(u: np.ndarray) -> tuple[float, float, float, float]:
    """Return ``(theta, phi, lam, phase)`` with ``u = e^{i phase} U3(theta, phi, lam)``."""
    alpha, beta, gamma, delta = zyz_angles(u)
    return gamma, beta, delta, alpha - (beta + delta) / 2.0


def is_identity_up_to_phase(u: np.ndarray, tol: float = 1e-10) -> bool:
    if abs(u[0, 0]) < 0.5:
        return False
    ph = u[0, 0] / abs(u[0, 0])
    return bool(np.allclose(u, ph * np.eye(u.shape[0]), atol=tol))


def _rot(kind: GateKind, q: QubitRef, angle: float) -> list[Instruction]:
    if abs(angle) < ANGLE_EPS:
        return []
    return [Instruction(kind, (q,), (angle,))]


def single_qubit_gates(u: np.ndarray, q: QubitRef) -> list[Instruction]:
    """Synthesize ``u`` on ``q`` up to global phase (empty when ``u`` is a phase)."""
    if is_identity_up_to_phase(u):
        return []
    theta, phi, lam, _ = u3_angles(u)
    if abs(theta) < ANGLE_EPS:
        return [Instruction(GateKind.Rz, (q,), (phi + lam,))]
    return [Instruction(GateKind.U3, (q,), (theta, phi, lam))]


def controlled_single_qubit(u: np.ndarray, ctrl: QubitRef, target: QubitRef) -> list[Instruction]:
    """Exact controlled-``u`` (phase included) from two CX and single-qubit rotations."""
    alpha, beta, gamma, delta = zyz_angles(u)
    out: list[Instruction] = []
    # C
    out += _rot(GateKind.Rz, target, (delta - beta) / 2.0)
    out.append(Instruction(GateKind.CX, (ctrl, target)))
    # B
    out += _rot(GateKind.Rz, target, -(delta + beta) / 2.0)
    out += _rot(GateKind.Ry, target, -gamma / 2.0)
    out.append(Instruction(GateKind.CX, (ctrl, target)))
    # A
    out += _rot(GateKind.Ry, target, gamma / 2.0)
    out += _rot(GateKind.Rz, target, beta)
    out += _rot(GateKind.U1, ctrl, alpha)
    return out


def unitary_sqrt(u: np.ndarray) -> np.ndarray:
    """Principal square root of a unitary via its eigendecomposition."""
    w, v = np.linalg.eig(u)
    # re-orthonormalize degenerate eigenspaces
    v, _ = np.linalg.qr(v)
    w = np.array([np.vdot(v[:, i], u @ v[:, i]) for i in range(len(w))])
    return v @ np.diag(np.sqrt(w)) @ v.conj().T


def multi_controlled_single_qubit(u: np.ndarray, controls: list[QubitRef],
                                  target: QubitRef) -> list[Instruction]:
    """Exact ``C^k(u)`` for ``k <= 2`` (Barenco et al., V*V = u construction for two controls)."""
    if not controls:
        return single_qubit_gates(u, target)
    if len(controls) == 1:
        return controlled_single_qubit(u, controls[0], target)
    if len(controls) == 2:
        c1, c2 = controls
        v = unitary_sqrt(u)
        vd = v.conj().T
        return (
            controlled_single_qubit(v, c2, target)
            + [Instruction(GateKind.CX, (c1, c2))]
            + controlled_single_qubit(vd, c2, target)
            + [Instruction(GateKind.CX, (c1, c2))]
            + controlled_single_qubit(v, c1, target)
        )
    raise ValueError("at most two controls are supported")

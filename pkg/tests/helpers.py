"""Shared builders and oracles for the test suite."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from qkc.ir import Circuit, GateKind, gate

KERNELS = Path(__file__).resolve().parent.parent / "kernels"

ONE_QUBIT = [GateKind.H, GateKind.X, GateKind.Y, GateKind.Z, GateKind.S, GateKind.Sdg,
             GateKind.T, GateKind.Tdg, GateKind.Rx, GateKind.Ry, GateKind.Rz, GateKind.U1, GateKind.U3]
TWO_QUBIT = [GateKind.CX, GateKind.CY, GateKind.CZ, GateKind.CH, GateKind.CPhase, GateKind.CRz,
             GateKind.Swap]


def random_circuit(rng: np.random.Generator, n: int, length: int, two_qubit_fraction: float = 0.35,
                   kinds_1q=ONE_QUBIT, kinds_2q=TWO_QUBIT) -> Circuit:
    """Measure-free circuit of ``length`` random gates on ``n`` qubits."""
    c = Circuit("random")
    for _ in range(length):
        if n > 1 and rng.random() < two_qubit_fraction:
            kind = kinds_2q[rng.integers(len(kinds_2q))]
            a, b = rng.choice(n, 2, replace=False)
            qubits = (int(a), int(b))
        else:
            kind = kinds_1q[rng.integers(len(kinds_1q))]
            qubits = (int(rng.integers(n)),)
        params = rng.uniform(-np.pi, np.pi, kind.n_params)
        c.append(gate(kind, *qubits, params=params))
    return c


def haar_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def tv_distance(p: dict, q: dict) -> float:
    tp, tq = sum(p.values()), sum(q.values())
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(k, 0) / tp - q.get(k, 0) / tq) for k in keys)


def permutation_matrix(perm: list[int], n: int) -> np.ndarray:
    """Matrix sending basis state with qubit ``i`` set to the state with qubit ``perm[i]`` set."""
    dim = 1 << n
    m = np.zeros((dim, dim))
    for j in range(dim):
        k = 0
        for i in range(n):
            if (j >> i) & 1:
                k |= 1 << perm[i]
        m[k, j] = 1
    return m

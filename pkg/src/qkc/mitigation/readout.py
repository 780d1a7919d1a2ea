"""Readout-error mitigation by inverting per-qubit confusion matrices."""

from __future__ import annotations

import threading
from typing import Iterable, Sequence

import numpy as np

from ..backend.simulator import Backend, ExecutionResult, measured_slots
from ..errors import SingularConfusionMatrix, TooManyQubitsForCalibration
from ..ir.circuit import Circuit, Instruction, flatten
from ..ir.gates import GateKind
from .base import MitigatedBackend

MAX_CALIBRATION_QUBITS = 12


def _code_to_key(code: int, m: int) -> str:
    return "".join("1" if (code >> i) & 1 else "0" for i in range(m))


def counts_to_vector(counts: dict[str, float], m: int) -> np.ndarray:
    """Probability vector indexed so that bit ``i`` of the index is key position ``i``."""
    vec = np.zeros(1 << m)
    for key, c in counts.items():
        vec[sum(1 << i for i, ch in enumerate(key) if ch == "1")] += c
    return vec / vec.sum()


def confusion_matrix(p01: float, p10: float) -> np.ndarray:
    """Column ``j`` is the read-out distribution of prepared state ``j``."""
    return np.array([[1.0 - p01, p10], [p01, 1.0 - p10]])


def correct_distribution(probs: np.ndarray, errors: Sequence[tuple[float, float]]) -> np.ndarray:
    """Apply the inverse tensor-product confusion matrix, clip negatives, renormalize."""
    m = len(errors)
    tensor = probs.reshape((2,) * m) if m else probs.copy()
    for k, (p01, p10) in enumerate(errors):
        if p01 + p10 >= 1.0:
            raise SingularConfusionMatrix(
                f"bit {k} has p01 + p10 = {p01 + p10:.3f} >= 1; its confusion matrix is not invertible")
        inv = np.linalg.inv(confusion_matrix(p01, p10))
        axis = m - 1 - k  # bit k of the flat index
        tensor = np.moveaxis(np.tensordot(inv, tensor, axes=([1], [axis])), 0, axis)
    out = np.clip(tensor.reshape(-1), 0.0, None)
    return out / out.sum()


class ReadoutMitigation(MitigatedBackend):
    """Corrects counts with confusion matrices calibrated on the measured qubits."""

    def __init__(self, inner: Backend):
        super().__init__(inner)
        self._cache: dict[tuple, list[tuple[float, float]]] = {}
        self._lock = threading.Lock()
        self.calibration_runs = 0

    def invalidate(self) -> None:
        with self._lock:
            self._cache.clear()

    def calibrate(self, wires: Sequence[tuple[int, int]], shots: int) -> list[tuple[float, float]]:
        """Per-slot (p01, p10) for ``(slot, qubit)`` pairs in slot order; cached."""
        key = (tuple(wires), shots)
        with self._lock:
            if key in self._cache:
                return self._cache[key]
        m = len(wires)
        zero = Circuit("calibrate0", [Instruction(GateKind.Measure, (ref,), (), slot)
                                      for slot, ref in wires])
        ones = Circuit("calibrate1", [Instruction(GateKind.X, (ref,)) for _, ref in wires]
                       + list(zero.children))
        p0 = counts_to_vector(self.inner.run(zero, shots).counts, m).reshape((2,) * m)
        p1 = counts_to_vector(self.inner.run(ones, shots).counts, m).reshape((2,) * m)
        errors = []
        for k in range(m):
            axis = m - 1 - k
            others = tuple(a for a in range(m) if a != axis)
            errors.append((float(p0.sum(axis=others)[1]), float(p1.sum(axis=others)[0])))
        with self._lock:
            self._cache[key] = errors
            self.calibration_runs += 1
        return errors

    def run(self, circuit: Circuit | Iterable[Instruction], shots: int) -> ExecutionResult:
        insts = flatten(circuit) if isinstance(circuit, Circuit) else list(circuit)
        slots = measured_slots(insts)
        if len(slots) > MAX_CALIBRATION_QUBITS:
            raise TooManyQubitsForCalibration(
                f"{len(slots)} measured bits exceed the calibration limit of {MAX_CALIBRATION_QUBITS}")
        raw = self.inner.run(insts, shots)
        if not slots:
            return raw
        last = {i.slot: i.qubits[0] for i in insts if i.kind is GateKind.Measure}
        errors = self.calibrate([(s, last[s]) for s in slots], shots)
        m = len(slots)
        probs = correct_distribution(counts_to_vector(raw.counts, m), errors)
        counts = {_code_to_key(c, m): float(p * raw.shots) for c, p in enumerate(probs) if p > 1e-12}
        parity = np.array([(-1) ** bin(c).count("1") for c in range(1 << m)])
        return ExecutionResult(counts, raw.shots, float(parity @ probs))

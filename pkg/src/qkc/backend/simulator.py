"""Dense statevector simulator with shot sampling, noise and streaming sessions.

Only the qubits a circuit touches are simulated, so a circuit placed on
physical qubits 5 and 6 costs two qubits of memory.  Noiseless circuits whose
measurements are all terminal are sampled from the final state in one pass;
anything else runs batched per-shot trajectories.
"""

from __future__ import annotations

import threading
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ..errors import BackendError, CapacityError, NoActiveSession, QubitOutOfRange, ZeroShots
from ..ir.circuit import Circuit, Instruction, flatten
from ..ir.gates import PAULI, GateKind, gate_matrix
from ..ir.unitary import apply_matrix, qubit_axis
from .buffer import QRegBuffer, parity_expectation
from .noise import NoiseModel

MAX_QUBITS = 24
CHUNK_AMPLITUDES = 1 << 22

_PAULI_1Q = [PAULI["X"], PAULI["Y"], PAULI["Z"]]
_PAULI_2Q = [np.kron(a, b) for a in (np.eye(2), *_PAULI_1Q) for b in (np.eye(2), *_PAULI_1Q)][1:]


@dataclass
class ExecutionResult:
    counts: dict[str, float]
    shots: int
    exp_val_z: float | None = None

    def expectation(self) -> float:
        return self.exp_val_z if self.exp_val_z is not None else parity_expectation(self.counts)


def _as_list(circuit: Circuit | Iterable[Instruction]) -> list[Instruction]:
    return flatten(circuit) if isinstance(circuit, Circuit) else list(circuit)


def measured_slots(insts: Sequence[Instruction]) -> list[int]:
    """Distinct classical slots written by the circuit, ascending; key position i is slot i."""
    return sorted({i.slot for i in insts if i.kind is GateKind.Measure})


def has_terminal_measurements(insts: Sequence[Instruction]) -> bool:
    """No gate, reset or second measurement touches a qubit after it was measured."""
    measured: set[int] = set()
    for inst in insts:
        if inst.kind is GateKind.Reset:
            return False
        if measured.intersection(inst.indices):
            return False
        if inst.kind is GateKind.Measure:
            measured.add(inst.indices[0])
    return True


def _keys(bits: np.ndarray) -> dict[str, int]:
    """Rows of a (shots, m) 0/1 array tallied as bitstrings, position i = column i."""
    shots, m = bits.shape
    if m == 0:
        return {"": shots}
    codes = (bits.astype(np.int64) << np.arange(m, dtype=np.int64)).sum(axis=1)
    values, counts = np.unique(codes, return_counts=True)
    out = {}
    for v, c in zip(values, counts):
        out["".join("1" if (int(v) >> i) & 1 else "0" for i in range(m))] = int(c)
    return out


class Session(ABC):
    """Streaming execution: each instruction is applied as soon as it arrives."""

    @abstractmethod
    def apply(self, inst: Instruction) -> None: ...

    @abstractmethod
    def measure(self, inst: Instruction) -> int: ...

    @abstractmethod
    def close(self) -> None: ...

    @abstractmethod
    def key(self) -> str:
        """Bits recorded so far, in ascending classical-slot order."""


class Backend(ABC):
    """Execution target contract; third-party hardware clients implement this."""

    name: str = "backend"
    supports_streaming: bool = False

    @abstractmethod
    def run(self, circuit: Circuit | Iterable[Instruction], shots: int) -> ExecutionResult:
        """Execute a flattened circuit ``shots`` times."""

    def open_session(self, n_qubits: int) -> Session:
        raise BackendError(f"backend {self.name!r} does not support streaming execution")

    def execute(self, circuit: Circuit | Iterable[Instruction], buffer: QRegBuffer,
                shots: int) -> QRegBuffer:
        insts = _as_list(circuit)
        top = max((q for i in insts for q in i.indices), default=-1)
        if top >= buffer.size:
            raise QubitOutOfRange(f"circuit uses qubit {top} but the register has {buffer.size}")
        result = self.run(insts, shots)
        buffer.set_result(result.counts, result.exp_val_z)
        return buffer


class StatevectorSession(Session):
    def __init__(self, n_qubits: int, rng: np.random.Generator, noise: NoiseModel | None = None):
        if n_qubits > MAX_QUBITS:
            raise CapacityError(f"the simulator supports at most {MAX_QUBITS} qubits, got {n_qubits}")
        self.n = n_qubits
        self.rng = rng
        self.noise = noise or NoiseModel()
        self.state = np.zeros((1,) + (2,) * n_qubits, dtype=complex)
        self.state[(0,) * (n_qubits + 1)] = 1.0
        self.bits: dict[int, int] = {}
        self.active = True

    def _check(self, inst: Instruction) -> None:
        if not self.active:
            raise NoActiveSession("the streaming session has been closed")
        for q in inst.indices:
            if q >= self.n:
                raise QubitOutOfRange(f"qubit {q} outside the {self.n}-qubit session")

    def apply(self, inst: Instruction) -> None:
        self._check(inst)
        if inst.kind is GateKind.Measure:
            self.measure(inst)
            return
        identity = {q: q for q in range(self.n)}
        self.state = _apply_step(self.state, inst, self.n, identity, self.noise, self.rng, None, None)

    def measure(self, inst: Instruction) -> int:
        self._check(inst)
        q = inst.indices[0]
        outcome = _measure(self.state, q, self.n, self.rng)
        self.state = _project(self.state, q, self.n, outcome)
        bit = int(outcome[0])
        p01, p10 = self.noise.readout(q)
        if (bit == 0 and self.rng.random() < p01) or (bit == 1 and self.rng.random() < p10):
            bit ^= 1
        self.bits[inst.slot] = bit
        return bit

    def close(self) -> None:
        self.active = False

    @property
    def statevector(self) -> np.ndarray:
        """Amplitudes indexed with qubit 0 as the least-significant bit."""
        return self.state.reshape(-1).copy()

    def probabilities(self) -> np.ndarray:
        return np.abs(self.statevector) ** 2

    def key(self) -> str:
        return "".join(str(self.bits[s]) for s in sorted(self.bits))


def _measure(state: np.ndarray, q: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """Born-rule outcomes for qubit ``q`` of every trajectory."""
    s = np.moveaxis(state, qubit_axis(q, n), 1).reshape(state.shape[0], 2, -1)
    p1 = np.sum(np.abs(s[:, 1]) ** 2, axis=1)
    norm = p1 + np.sum(np.abs(s[:, 0]) ** 2, axis=1)
    return rng.random(state.shape[0]) * norm < p1


def _project(state: np.ndarray, q: int, n: int, outcome: np.ndarray) -> np.ndarray:
    axis = qubit_axis(q, n)
    s = np.moveaxis(state, axis, 1).copy()
    s[~outcome, 1] = 0
    s[outcome, 0] = 0
    norms = np.sqrt(np.sum(np.abs(s.reshape(s.shape[0], -1)) ** 2, axis=1))
    s /= norms.reshape((-1,) + (1,) * (s.ndim - 1))
    return np.moveaxis(s, 1, axis)


def _depolarize(state, qs, n, p, rng):
    if p <= 0:
        return state
    hit = np.flatnonzero(rng.random(state.shape[0]) < p)
    if hit.size == 0:
        return state
    paulis = _PAULI_1Q if len(qs) == 1 else _PAULI_2Q
    choice = rng.integers(len(paulis), size=hit.size)
    state = state.copy()
    for k in np.unique(choice):
        rows = hit[choice == k]
        state[rows] = apply_matrix(state[rows], paulis[k], qs, n)
    return state


def _apply_step(state, inst, n, index, noise, rng, bits, slot_pos):
    qs = tuple(index[q] for q in inst.indices)
    if inst.kind is GateKind.Measure:
        outcome = _measure(state, qs[0], n, rng)
        state = _project(state, qs[0], n, outcome)
        if bits is not None:
            p01, p10 = noise.readout(inst.indices[0])
            flip = rng.random(outcome.size)
            recorded = np.where(outcome, flip >= p10, flip < p01)
            bits[:, slot_pos[inst.slot]] = recorded
        return state
    if inst.kind is GateKind.Reset:
        outcome = _measure(state, qs[0], n, rng)
        state = _project(state, qs[0], n, outcome)
        if outcome.any():
            state[outcome] = apply_matrix(state[outcome], PAULI["X"], qs, n)
        return state
    state = apply_matrix(state, gate_matrix(inst.kind, inst.params), qs, n)
    return _depolarize(state, qs, n, noise.p1 if len(qs) == 1 else noise.p2, rng)


class StatevectorBackend(Backend):
    """The built-in ``sim`` backend."""

    name = "sim"
    supports_streaming = True

    def __init__(self, noise: NoiseModel | None = None, seed: int | None = None,
                 max_qubits: int = MAX_QUBITS):
        self.noise = noise or NoiseModel()
        self.seed = seed
        self.max_qubits = max_qubits
        self._calls = 0
        self._lock = threading.Lock()

    def next_rng(self) -> np.random.Generator:
        """A fresh generator per call: reproducible sequences under a fixed seed."""
        with self._lock:
            self._calls += 1
            k = self._calls
        if self.seed is None:
            return np.random.default_rng()
        return np.random.default_rng([int(self.seed) & 0xFFFFFFFF, k])

    def _compact(self, insts: Sequence[Instruction]) -> tuple[int, dict[int, int]]:
        used = sorted({q for i in insts for q in i.indices})
        if len(used) > self.max_qubits:
            raise CapacityError(
                f"circuit touches {len(used)} qubits; the simulator supports at most {self.max_qubits}")
        return len(used), {q: k for k, q in enumerate(used)}

    def _final_state(self, insts: Sequence[Instruction], n: int, index: dict[int, int]) -> np.ndarray:
        state = np.zeros((1,) + (2,) * n, dtype=complex)
        state[(0,) * (n + 1)] = 1.0
        for inst in insts:
            if inst.kind.is_unitary:
                state = apply_matrix(state, gate_matrix(inst.kind, inst.params),
                                     tuple(index[q] for q in inst.indices), n)
        return state.reshape(-1)

    def run(self, circuit: Circuit | Iterable[Instruction], shots: int) -> ExecutionResult:
        insts = _as_list(circuit)
        if isinstance(shots, bool) or not isinstance(shots, (int, np.integer)) or shots < 1:
            raise ZeroShots(f"shots must be a positive integer, got {shots!r}")
        shots = int(shots)
        n, index = self._compact(insts)
        slots = measured_slots(insts)
        slot_pos = {s: k for k, s in enumerate(slots)}
        rng = self.next_rng()
        if self.noise.p1 == 0 and self.noise.p2 == 0 and has_terminal_measurements(insts):
            bits = self._sample_final(insts, n, index, slots, slot_pos, shots, rng)
        else:
            bits = np.zeros((shots, len(slots)), dtype=bool)
            chunk = max(1, CHUNK_AMPLITUDES >> n)
            for start in range(0, shots, chunk):
                stop = min(shots, start + chunk)
                bits[start:stop] = self._trajectories(insts, n, index, slot_pos, stop - start, rng)
        counts = _keys(bits)
        return ExecutionResult(counts, shots, parity_expectation(counts))

    def _sample_final(self, insts, n, index, slots, slot_pos, shots, rng) -> np.ndarray:
        psi = self._final_state(insts, n, index)
        probs = np.abs(psi) ** 2
        probs /= probs.sum()
        samples = rng.choice(probs.size, size=shots, p=probs)
        bits = np.zeros((shots, len(slots)), dtype=bool)
        for inst in insts:
            if inst.kind is GateKind.Measure:
                q = inst.indices[0]
                raw = (samples >> index[q]) & 1 == 1
                p01, p10 = self.noise.readout(q)
                if p01 or p10:
                    flip = rng.random(shots)
                    raw = np.where(raw, flip >= p10, flip < p01)
                bits[:, slot_pos[inst.slot]] = raw
        return bits

    def _trajectories(self, insts, n, index, slot_pos, batch, rng) -> np.ndarray:
        state = np.zeros((batch,) + (2,) * n, dtype=complex)
        state[(slice(None),) + (0,) * n] = 1.0
        bits = np.zeros((batch, len(slot_pos)), dtype=bool)
        for inst in insts:
            state = _apply_step(state, inst, n, index, self.noise, rng, bits, slot_pos)
        return bits

    def probabilities(self, circuit: Circuit | Iterable[Instruction]) -> dict[str, float]:
        """Exact outcome distribution of a noiseless circuit with terminal measurements."""
        insts = _as_list(circuit)
        if not self.noise.is_noiseless:
            raise BackendError("exact probabilities are only available without noise")
        if not has_terminal_measurements(insts):
            raise BackendError("exact probabilities need measurements at the end of the circuit")
        n, index = self._compact(insts)
        slots = measured_slots(insts)
        if not slots:
            return {"": 1.0}
        probs = np.abs(self._final_state(insts, n, index)) ** 2
        last_writer = {inst.slot: index[inst.indices[0]] for inst in insts if inst.kind is GateKind.Measure}
        codes = np.zeros(probs.size, dtype=np.int64)
        basis = np.arange(probs.size, dtype=np.int64)
        for k, s in enumerate(slots):
            codes |= ((basis >> last_writer[s]) & 1) << k
        dist = np.bincount(codes, weights=probs, minlength=1 << len(slots))
        return {"".join("1" if (c >> i) & 1 else "0" for i in range(len(slots))): float(p)
                for c, p in enumerate(dist) if p > 1e-15}

    def open_session(self, n_qubits: int) -> StatevectorSession:
        return StatevectorSession(n_qubits, self.next_rng(), self.noise)

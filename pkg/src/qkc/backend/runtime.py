"""Queued (NISQ) and streaming (FTQC) quantum runtimes."""

from __future__ import annotations

from collections import Counter
from typing import Callable

from ..errors import BackendError, ZeroShots
from ..ir.circuit import Circuit, Instruction
from .buffer import QRegBuffer, parity_expectation
from .simulator import Backend, ExecutionResult, Session


class NisqRuntime:
    """Accumulates instructions and sends the whole circuit on submit."""

    def __init__(self, backend: Backend, transform: Callable[[Circuit], Circuit] | None = None):
        self.backend = backend
        self.transform = transform
        self.queue: list[Instruction] = []

    def apply(self, inst: Instruction) -> None:
        self.queue.append(inst)

    def extend(self, insts) -> None:
        self.queue.extend(insts)

    def submit(self, buffer: QRegBuffer | None, shots: int, name: str = "circuit") -> ExecutionResult:
        """Flush the queue to the backend; the queue is empty afterwards."""
        circuit = Circuit(name, list(self.queue))
        self.queue.clear()
        if self.transform is not None:
            circuit = self.transform(circuit)
        result = self.backend.run(circuit, shots)
        if buffer is not None:
            buffer.set_result(result.counts, result.exp_val_z)
        return result


class FtqcRuntime:
    """Runs a program once per shot against a live session.

    ``program(session)`` must dispatch every instruction to the session as it
    is produced; measurement bits come back synchronously.
    """

    def __init__(self, backend: Backend):
        if not backend.supports_streaming:
            raise BackendError(f"backend {backend.name!r} cannot stream instructions (ftqc mode)")
        self.backend = backend
        self.last_session: Session | None = None

    def run(self, program: Callable[[Session], None], n_qubits: int, shots: int,
            buffer: QRegBuffer | None = None) -> ExecutionResult:
        if isinstance(shots, bool) or not isinstance(shots, int) or shots < 1:
            raise ZeroShots(f"shots must be a positive integer, got {shots!r}")
        tally: Counter[str] = Counter()
        for _ in range(shots):
            session = self.backend.open_session(n_qubits)
            try:
                program(session)
            finally:
                session.close()
            tally[session.key()] += 1
            self.last_session = session
        counts = dict(sorted(tally.items()))
        result = ExecutionResult(counts, shots, parity_expectation(counts))
        if buffer is not None:
            buffer.set_result(counts)
        return result

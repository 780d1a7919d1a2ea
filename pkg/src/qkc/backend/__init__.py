"""Execution layer: backend contract, statevector simulator and runtimes."""

from .buffer import QRegBuffer, parity_expectation, qalloc
from .noise import NoiseModel, load_noise_model
from .runtime import FtqcRuntime, NisqRuntime
from .selector import backend_names, make_backend, parse_selector, register_backend
from .simulator import (
    MAX_QUBITS, Backend, ExecutionResult, Session, StatevectorBackend, StatevectorSession,
    has_terminal_measurements, measured_slots,
)

__all__ = [
    "QRegBuffer", "parity_expectation", "qalloc", "NoiseModel", "load_noise_model",
    "FtqcRuntime", "NisqRuntime", "backend_names", "make_backend", "parse_selector",
    "register_backend", "MAX_QUBITS", "Backend", "ExecutionResult", "Session",
    "StatevectorBackend", "StatevectorSession", "has_terminal_measurements", "measured_slots",
]

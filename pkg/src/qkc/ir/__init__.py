"""Circuit intermediate representation."""

from .circuit import (
    DEFAULT_REGISTER, Circuit, CircuitStats, Instruction, QubitRef, as_qubit, flatten,
    format_instruction, gate, print_circuit, stats,
)
from .gates import GateKind, gate_from_name, gate_matrix
from .transforms import adjoint, control_instruction, controlled, inverse, toffoli
from .unitary import equal_up_to_phase, phase_distance, to_unitary

__all__ = [
    "DEFAULT_REGISTER", "Circuit", "CircuitStats", "Instruction", "QubitRef", "as_qubit",
    "flatten", "format_instruction", "gate", "print_circuit", "stats", "GateKind",
    "gate_from_name", "gate_matrix", "adjoint", "control_instruction", "controlled",
    "inverse", "toffoli", "equal_up_to_phase", "phase_distance", "to_unitary",
]

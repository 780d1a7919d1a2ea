"""Circuit optimization passes and the pass manager."""

from .manager import (
    OPT_LEVELS, PassStats, get_pass, pass_names, register_pass, run_level, run_pass, run_passes,
)
from .optimizers import circuit_optimizer, rotation_folding, single_qubit_gate_merging

__all__ = [
    "OPT_LEVELS", "PassStats", "get_pass", "pass_names", "register_pass", "run_level",
    "run_pass", "run_passes", "circuit_optimizer", "rotation_folding", "single_qubit_gate_merging",
]

"""Stackable error-mitigation decorators around a backend."""

from .base import MitigatedBackend, build_chain, mitigation_names, register_mitigation
from .readout import (
    MAX_CALIBRATION_QUBITS, ReadoutMitigation, confusion_matrix, correct_distribution,
    counts_to_vector,
)
from .zne import DEFAULT_SCALES, ZeroNoiseExtrapolation, fold_global, linear_extrapolate, split_measurements

register_mitigation("ro-error", ReadoutMitigation)
register_mitigation("zne", ZeroNoiseExtrapolation)

__all__ = [
    "MitigatedBackend", "build_chain", "mitigation_names", "register_mitigation",
    "MAX_CALIBRATION_QUBITS", "ReadoutMitigation", "confusion_matrix", "correct_distribution",
    "counts_to_vector", "DEFAULT_SCALES", "ZeroNoiseExtrapolation", "fold_global",
    "linear_extrapolate", "split_measurements",
]

"""Zero-noise extrapolation with global unitary folding."""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from ..backend.simulator import Backend, ExecutionResult
from ..errors import FoldingNonUnitary
from ..ir.circuit import Circuit, Instruction, flatten
from ..ir.gates import GateKind
from ..ir.transforms import inverse
from .base import MitigatedBackend

DEFAULT_SCALES = (1, 3, 5)


def split_measurements(insts: Sequence[Instruction]) -> tuple[list[Instruction], list[Instruction]]:
    """Unitary prefix and the trailing block of measurements."""
    cut = len(insts)
    while cut and insts[cut - 1].kind is GateKind.Measure:
        cut -= 1
    prefix, suffix = list(insts[:cut]), list(insts[cut:])
    bad = next((i for i in prefix if not i.kind.is_unitary), None)
    if bad is not None:
        raise FoldingNonUnitary(f"cannot fold a circuit containing a mid-circuit {bad.kind.value}")
    return prefix, suffix


def fold_global(prefix: Sequence[Instruction], scale: int) -> list[Instruction]:
    """``C (C^dagger C)^k`` with ``scale = 2k + 1``."""
    if scale < 1 or scale % 2 == 0:
        raise ValueError(f"fold scale must be an odd positive integer, got {scale}")
    dagger = [inverse(i) for i in reversed(prefix)]
    out = list(prefix)
    for _ in range((scale - 1) // 2):
        out += dagger + list(prefix)
    return out


def linear_extrapolate(scales: Sequence[float], values: Sequence[float]) -> float:
    """Ordinary least-squares line through the points, evaluated at scale 0."""
    _, intercept = np.polyfit(np.asarray(scales, float), np.asarray(values, float), 1)
    return float(intercept)


class ZeroNoiseExtrapolation(MitigatedBackend):
    """Reports the zero-noise estimate of exp_val_z; counts are those of scale 1."""

    def __init__(self, inner: Backend, scales: Sequence[int] = DEFAULT_SCALES):
        super().__init__(inner)
        self.scales = tuple(scales)
        self.last_values: list[float] = []

    def run(self, circuit: Circuit | Iterable[Instruction], shots: int) -> ExecutionResult:
        insts = flatten(circuit) if isinstance(circuit, Circuit) else list(circuit)
        prefix, suffix = split_measurements(insts)
        results = [self.inner.run(fold_global(prefix, s) + suffix, shots) for s in self.scales]
        self.last_values = [r.expectation() for r in results]
        base = results[0]
        return ExecutionResult(base.counts, base.shots, linear_extrapolate(self.scales, self.last_values))

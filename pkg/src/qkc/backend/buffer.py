"""Qubit allocations that carry execution results."""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field
from typing import Mapping, TextIO

from ..errors import BackendError, EmptyCounts


def parity_expectation(counts: Mapping[str, float]) -> float:
    """Sum of counts weighted by (-1)^popcount over the total."""
    total = float(sum(counts.values()))
    if total <= 0:
        raise EmptyCounts("no measurement results to take an expectation over")
    return sum(c * (-1) ** key.count("1") for key, c in counts.items()) / total


@dataclass
class QRegBuffer:
    """``size`` qubits plus the counts of the last execution on them.

    Count keys list the measured classical bits in ascending slot order, so
    position ``i`` of ``"100"`` is the result written to the ``i``-th slot
    (the qubit index when a measurement names no explicit slot).
    """
    size: int
    name: str = "q"
    counts: dict[str, float] = field(default_factory=dict)
    mitigated_exp_val: float | None = None

    def __post_init__(self):
        if isinstance(self.size, bool) or not isinstance(self.size, int) or self.size < 1:
            raise BackendError(f"a register needs at least one qubit, got {self.size!r}")

    @property
    def shots(self) -> int:
        return int(round(sum(self.counts.values())))

    def exp_val_z(self) -> float:
        if self.mitigated_exp_val is not None:
            return self.mitigated_exp_val
        return parity_expectation(self.counts)

    def probabilities(self) -> dict[str, float]:
        total = float(sum(self.counts.values()))
        if total <= 0:
            raise EmptyCounts("buffer has no counts")
        return {k: v / total for k, v in self.counts.items()}

    def set_result(self, counts: Mapping[str, float], exp_val: float | None = None) -> None:
        self.counts = dict(sorted(counts.items()))
        self.mitigated_exp_val = exp_val

    def to_json(self) -> dict:
        counts = {k: (int(v) if float(v).is_integer() else v) for k, v in sorted(self.counts.items())}
        return {"counts": counts, "shots": self.shots}

    def print(self, sink: TextIO | None = None) -> None:
        (sys.stdout if sink is None else sink).write(json.dumps(self.to_json()) + "\n")


def qalloc(n: int, name: str = "q") -> QRegBuffer:
    return QRegBuffer(n, name)

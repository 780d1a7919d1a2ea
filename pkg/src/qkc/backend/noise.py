"""Readout and depolarizing error descriptions."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import NoiseModelError


def _probability(value, what: str) -> float:
    try:
        p = float(value)
    except (TypeError, ValueError):
        raise NoiseModelError(f"{what} must be a number, got {value!r}") from None
    if not 0.0 <= p <= 1.0:
        raise NoiseModelError(f"{what} must lie in [0, 1], got {p}")
    return p


@dataclass(frozen=True)
class NoiseModel:
    """Per-qubit readout flips and depolarizing channels after gates.

    ``readout_errors[q] = (p01, p10)`` where ``p01`` is P(read 1 | prepared 0).
    """
    readout_errors: dict[int, tuple[float, float]] = field(default_factory=dict)
    p1: float = 0.0
    p2: float = 0.0

    def __post_init__(self):
        for q, (p01, p10) in self.readout_errors.items():
            _probability(p01, f"p01 of qubit {q}")
            _probability(p10, f"p10 of qubit {q}")
        _probability(self.p1, "one_qubit depolarizing")
        _probability(self.p2, "two_qubit depolarizing")

    @property
    def is_noiseless(self) -> bool:
        return self.p1 == 0 and self.p2 == 0 and not self.has_readout_error

    @property
    def has_readout_error(self) -> bool:
        return any(p01 > 0 or p10 > 0 for p01, p10 in self.readout_errors.values())

    def readout(self, qubit: int) -> tuple[float, float]:
        return self.readout_errors.get(qubit, (0.0, 0.0))

    @classmethod
    def from_dict(cls, data: dict) -> "NoiseModel":
        if not isinstance(data, dict):
            raise NoiseModelError("noise model must be a JSON object")
        readout: dict[int, tuple[float, float]] = {}
        for entry in data.get("readout_errors", []):
            try:
                q = int(entry["qubit"])
            except (KeyError, TypeError, ValueError):
                raise NoiseModelError(f"readout error entry {entry!r} needs an integer 'qubit'") from None
            readout[q] = (_probability(entry.get("p01", 0.0), f"p01 of qubit {q}"),
                          _probability(entry.get("p10", 0.0), f"p10 of qubit {q}"))
        dep = data.get("depolarizing", {}) or {}
        if not isinstance(dep, dict):
            raise NoiseModelError("'depolarizing' must be an object")
        return cls(readout, _probability(dep.get("one_qubit", 0.0), "one_qubit depolarizing"),
                   _probability(dep.get("two_qubit", 0.0), "two_qubit depolarizing"))

    def to_dict(self) -> dict:
        return {
            "readout_errors": [{"qubit": q, "p01": p01, "p10": p10}
                               for q, (p01, p10) in sorted(self.readout_errors.items())],
            "depolarizing": {"one_qubit": self.p1, "two_qubit": self.p2},
        }


def load_noise_model(path: str | os.PathLike) -> NoiseModel:
    p = Path(path)
    try:
        data = json.loads(p.read_text(encoding="utf-8"))
    except OSError as exc:
        raise NoiseModelError(f"cannot read noise model {p}: {exc.strerror}") from None
    except ValueError as exc:
        raise NoiseModelError(f"{p}: invalid JSON ({exc})") from None
    return NoiseModel.from_dict(data)

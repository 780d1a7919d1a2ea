"""Pass registry, optimization levels and per-pass statistics."""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from ..errors import UnknownPass
from ..ir.circuit import Circuit, CircuitStats, Instruction, flatten, stats
from .optimizers import BUILTIN_PASSES

PassFn = Callable[[Sequence[Instruction]], list[Instruction]]

OPT_LEVELS: dict[int, tuple[str, ...]] = {
    0: (),
    1: ("rotation-folding", "single-qubit-gate-merging", "circuit-optimizer"),
}

_registry: dict[str, PassFn] = dict(BUILTIN_PASSES)
_lock = threading.Lock()


@dataclass
class PassStats:
    pass_name: str
    wall_time: float  # seconds
    gates_before: CircuitStats
    gates_after: CircuitStats

    @property
    def reduction_fraction(self) -> float:
        before = self.gates_before.total_gates
        return 0.0 if before == 0 else 1.0 - self.gates_after.total_gates / before

    def to_dict(self) -> dict:
        return {
            "name": self.pass_name,
            "ms": round(self.wall_time * 1000.0, 3),
            "reduction_fraction": self.reduction_fraction,
            "before": self.gates_before.to_dict(),
            "after": self.gates_after.to_dict(),
        }


def register_pass(name: str, fn: PassFn) -> None:
    """Add or replace a named pass; it must preserve the unitary and not add gates."""
    with _lock:
        _registry[name] = fn


def pass_names() -> list[str]:
    with _lock:
        return sorted(_registry)


def get_pass(name: str) -> PassFn:
    with _lock:
        fn = _registry.get(name)
    if fn is None:
        raise UnknownPass(f"unknown pass {name!r}; available: {', '.join(pass_names())}")
    return fn


def _as_list(circuit: Circuit | Iterable[Instruction]) -> list[Instruction]:
    return flatten(circuit) if isinstance(circuit, Circuit) else list(circuit)


def run_pass(name: str, circuit: Circuit | Iterable[Instruction]) -> tuple[Circuit, PassStats]:
    fn = get_pass(name)
    insts = _as_list(circuit)
    before = stats(insts)
    start = time.perf_counter()
    result = fn(insts)
    elapsed = time.perf_counter() - start
    cname = circuit.name if isinstance(circuit, Circuit) else "circuit"
    return Circuit(cname, list(result)), PassStats(name, elapsed, before, stats(result))


def run_passes(names: Iterable[str], circuit: Circuit | Iterable[Instruction]) -> tuple[Circuit, list[PassStats]]:
    names = list(names)
    for n in names:
        get_pass(n)
    current = circuit if isinstance(circuit, Circuit) else Circuit("circuit", list(circuit))
    report: list[PassStats] = []
    for n in names:
        current, st = run_pass(n, current)
        report.append(st)
    return current, report


def run_level(level: int, circuit: Circuit | Iterable[Instruction]) -> tuple[Circuit, list[PassStats]]:
    if level not in OPT_LEVELS:
        raise UnknownPass(f"unknown optimization level {level}; available: {sorted(OPT_LEVELS)}")
    return run_passes(OPT_LEVELS[level], circuit)

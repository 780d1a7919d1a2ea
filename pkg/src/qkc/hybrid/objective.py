"""Variational objective functions: parameters in, expectation value out."""

from __future__ import annotations

import json
import os
import threading
from pathlib import Path
from typing import Any, Callable, Mapping, Sequence

import numpy as np

from ..backend.selector import make_backend
from ..errors import ArityMismatch, HybridError, NoDefaultTranslatorForSignature, ObjectiveEvaluationFailure, QkcError
from ..frontend.ast import ParamType
from ..frontend.interpreter import QReg
from ..frontend.registry import KernelHandle
from ..ir.circuit import Circuit
from ..mitigation import build_chain
from .observe import circuit_expectation
from .pauli import PauliOperator

Translator = Callable[[np.ndarray], Sequence[Any]]

GATHER_STATISTICS = "vqe-gather-statistics"


def default_translator(handle: KernelHandle, n_params: int) -> Translator:
    """Map the parameter vector onto a kernel whose only classical argument is a real or a real vector."""
    classical = [p for p in handle.definition.signature.params if p.type is not ParamType.QREG]
    kinds = [p.type for p in classical]
    if kinds == []:
        return lambda x: ()
    if kinds == [ParamType.REAL] and n_params == 1:
        return lambda x: (float(x[0]),)
    if kinds == [ParamType.REAL_VECTOR]:
        return lambda x: ([float(v) for v in x],)
    sig = ", ".join(p.type.value for p in classical)
    raise NoDefaultTranslatorForSignature(
        f"kernel {handle.name!r} takes ({sig}) with {n_params} parameter(s); supply a translator")


class ObjectiveFunction:
    """Expectation of ``operator`` in the state prepared by ``kernel``.

    ``translator(x)`` returns the kernel's classical arguments in order; every
    qreg parameter receives a register of ``n_qubits`` qubits.  With
    ``shots=None`` values come from the exact statevector.
    """

    def __init__(self, kernel: KernelHandle, operator: PauliOperator, n_params: int,
                 translator: Translator | None = None, options: Mapping[str, Any] | None = None,
                 backend: str = "sim", shots: int | None = None, seed: int | None = None,
                 mitigation: Sequence[str] = (), n_qubits: int | None = None):
        self.kernel = kernel
        self.operator = operator
        self.n_params = int(n_params)
        self.translator = translator or default_translator(kernel, self.n_params)
        self.options = dict(options or {})
        self.gather = int(self.options.get(GATHER_STATISTICS, 1))
        if self.gather < 1:
            raise HybridError(f"{GATHER_STATISTICS} must be at least 1, got {self.gather}")
        self.backend_selector = backend
        self.shots = shots
        self.seed = seed
        self.mitigation = list(mitigation)
        self.n_qubits = max(operator.n_qubits, 1) if n_qubits is None else int(n_qubits)
        self.history: list[dict] = []
        self._lock = threading.Lock()
        self.reset()

    def reset(self) -> None:
        """Fresh backend and RNG stream, empty history."""
        self.backend = build_chain(make_backend(self.backend_selector, self.seed), self.mitigation)
        self.history = []

    def clone(self) -> "ObjectiveFunction":
        return ObjectiveFunction(self.kernel, self.operator, self.n_params, self.translator,
                                 self.options, self.backend_selector, self.shots, self.seed,
                                 self.mitigation, self.n_qubits)

    def circuit(self, x: Sequence[float]) -> Circuit:
        x = self._check(x)
        classical = iter(self.translator(x))
        args = []
        for p in self.kernel.definition.signature.params:
            args.append(QReg(self.n_qubits) if p.type is ParamType.QREG else next(classical))
        return self.kernel.circuit(*args)

    def _check(self, x: Sequence[float]) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float)) if self.n_params else np.asarray(x, dtype=float).reshape(-1)
        if x.size != self.n_params:
            raise ArityMismatch(f"objective takes {self.n_params} parameter(s), got {x.size}")
        return x

    def __call__(self, x: Sequence[float]) -> float:
        x = self._check(x)
        try:
            circuit = self.circuit(x)
            values = [circuit_expectation(self.operator, circuit, self.backend, self.shots)
                      for _ in range(self.gather)]
        except ArityMismatch:
            raise
        except QkcError as exc:
            raise ObjectiveEvaluationFailure(f"evaluation at {list(x)} failed: {exc}") from exc
        value = float(np.mean(values))
        with self._lock:
            self.history.append({"iter": len(self.history), "params": [float(v) for v in x],
                                 "value": value})
        return value

    evaluate = __call__

    def persist_data(self, path: str | os.PathLike) -> None:
        """Write the evaluation history as JSON lines."""
        with self._lock:
            rows = list(self.history)
        Path(path).write_text("".join(json.dumps(r) + "\n" for r in rows), encoding="utf-8")


def create_objective(kernel: KernelHandle, operator: PauliOperator, n_params: int,
                     translator: Translator | None = None,
                     options: Mapping[str, Any] | None = None, **kwargs) -> ObjectiveFunction:
    return ObjectiveFunction(kernel, operator, n_params, translator, options, **kwargs)

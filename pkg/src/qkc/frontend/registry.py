"""Runtime kernel registry with source-hash caching."""

from __future__ import annotations

import hashlib
import os
import sys
import threading
from pathlib import Path
from typing import TextIO

from ..errors import FrontendError, UnknownKernelName
from ..ir.circuit import Circuit, QubitRef, print_circuit
from ..ir.transforms import adjoint as ir_adjoint
from ..ir.transforms import controlled
from ..mode import ExecutionMode
from .ast import KernelDef
from .interpreter import Interpreter, MeasureSource, as_qreg
from .parser import parse_kernels, parse_path, preprocess


class KernelRegistry:
    """Maps kernel names to definitions.  Safe to share between threads."""

    def __init__(self):
        self._lock = threading.RLock()
        self._kernels: dict[str, KernelDef] = {}
        self._compiled: dict[str, list[str]] = {}
        self.compile_count = 0

    def jit_compile(self, source: str, filename: str | None = None,
                    base_dir: str | os.PathLike | None = None) -> list[str]:
        """Parse and register every kernel in ``source``; identical source is parsed once."""
        text, _ = preprocess(source, filename, base_dir)
        key = hashlib.sha256(text.encode("utf-8")).hexdigest()
        with self._lock:
            if key in self._compiled:
                return list(self._compiled[key])
        kernels = parse_kernels(source, filename=filename, base_dir=base_dir)
        with self._lock:
            if key in self._compiled:
                return list(self._compiled[key])
            for k in kernels:
                self._kernels[k.name] = k
            names = [k.name for k in kernels]
            self._compiled[key] = names
            self.compile_count += 1
            return list(names)

    def load_file(self, path: str | os.PathLike) -> list[str]:
        """Register the kernels of a ``.qk`` file or a standalone ``.qasm`` program."""
        p = Path(path)
        if p.suffix.lower() == ".qasm":
            names = []
            for kdef in parse_path(p):
                self.register(kdef)
                names.append(kdef.name)
            return names
        try:
            text = p.read_text(encoding="utf-8")
        except OSError as exc:
            raise FrontendError(f"cannot read {p}: {exc.strerror}") from None
        return self.jit_compile(text, filename=str(p), base_dir=p.parent)

    def register(self, kdef: KernelDef) -> None:
        with self._lock:
            self._kernels[kdef.name] = kdef

    def lookup(self, name: str) -> KernelDef | None:
        with self._lock:
            return self._kernels.get(name)

    def names(self) -> list[str]:
        with self._lock:
            return sorted(self._kernels)

    def get(self, name: str) -> KernelDef:
        kdef = self.lookup(name)
        if kdef is None:
            raise UnknownKernelName(f"no kernel named {name!r}; known: {', '.join(self.names()) or '(none)'}")
        return kdef

    def get_kernel(self, name: str) -> "KernelHandle":
        self.get(name)
        return KernelHandle(self, name)

    def instantiate(self, name: str, args: list, parent: Circuit | None = None,
                    mode: ExecutionMode = ExecutionMode.NISQ,
                    measure_source: MeasureSource | None = None) -> Circuit:
        interp = Interpreter(self.lookup, mode=mode, source=measure_source)
        return interp.instantiate(self.get(name), list(args), parent)

    def invoke(self, name: str, *args, config=None):
        """Run kernel ``name`` on the configured backend; returns the first qreg buffer."""
        return self.get_kernel(name)(*args, config=config)


class KernelHandle:
    """Callable reference to a registered kernel."""

    def __init__(self, registry: KernelRegistry, name: str):
        self.registry = registry
        self.name = name

    @property
    def definition(self) -> KernelDef:
        return self.registry.get(self.name)

    def circuit(self, *args) -> Circuit:
        return self.registry.instantiate(self.name, list(args))

    def adjoint(self, *args) -> Circuit:
        return ir_adjoint(self.circuit(*args))

    def ctrl(self, ctrl, *args) -> Circuit:
        """Controlled body; an integer ``ctrl`` indexes the first qreg argument."""
        if not isinstance(ctrl, QubitRef):
            regs = [p.name for p in self.definition.signature.qreg_params]
            bound = dict(zip([p.name for p in self.definition.signature.params], args))
            ctrl = as_qreg(bound[regs[0]])[int(ctrl)]
        return controlled(self.circuit(*args), ctrl)

    def print_kernel(self, sink: TextIO | None = None, *args) -> None:
        print_circuit(self.circuit(*args), sys.stdout if sink is None else sink)

    def __call__(self, *args, config=None):
        from ..pipeline import run_kernel
        return run_kernel(self.registry, self.name, list(args), config)


_default: KernelRegistry | None = None
_default_lock = threading.Lock()


def default_registry() -> KernelRegistry:
    global _default
    with _default_lock:
        if _default is None:
            _default = KernelRegistry()
        return _default


def jit_compile(registry: KernelRegistry, source: str, **kwargs) -> list[str]:
    return registry.jit_compile(source, **kwargs)


def get_kernel(registry: KernelRegistry, name: str) -> KernelHandle:
    return registry.get_kernel(name)


def invoke(registry: KernelRegistry, name: str, *args, config=None):
    return registry.invoke(name, *args, config=config)

"""Kernel instantiation: interpret a KernelDef body into a Circuit.

In NISQ mode measurement results are not available while the circuit is being
built, so a bit bound by ``bool b = Measure(q[i]);`` is a :class:`DeferredBit`
that refuses to be used for branching.  In FTQC mode every instruction is sent
to a streaming measurement source as soon as it is produced and ``Measure``
returns the sampled bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable, Protocol

import numpy as np

from ..errors import (
    ArgumentMismatch, EvaluationError, MeasurementDependentBranchInNisqMode, QkcError,
    UnresolvedKernel,
)
from ..ir.circuit import DEFAULT_REGISTER, Circuit, Instruction, QubitRef
from ..ir.gates import GateKind
from ..ir.transforms import adjoint as ir_adjoint
from ..ir.transforms import controlled as ir_controlled
from ..mode import ExecutionMode
from . import ast as A
from .decompose import decompose_unitary

MAX_CALL_DEPTH = 64
MAX_LOOP_ITERATIONS = 1_000_000
MAX_MATRIX_DIM = 1024


class MeasureSource(Protocol):
    """Streaming backend used in FTQC mode."""

    def apply(self, inst: Instruction) -> None: ...

    def measure(self, inst: Instruction) -> int: ...


@dataclass(frozen=True)
class QReg:
    """A kernel's view of an allocated register (possibly a slice)."""
    size: int
    offset: int = 0
    register: str = DEFAULT_REGISTER

    def __getitem__(self, i: int) -> QubitRef:
        if isinstance(i, bool) or not isinstance(i, (int, np.integer)):
            raise EvaluationError(f"qubit index must be an integer, got {i!r}")
        if not 0 <= i < self.size:
            raise EvaluationError(f"qubit index {i} out of range for a register of size {self.size}")
        return QubitRef(self.register, self.offset + int(i))

    def qubits(self) -> list[QubitRef]:
        return [self[i] for i in range(self.size)]


def as_qreg(value: Any) -> QReg:
    if isinstance(value, QReg):
        return value
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        if value < 1:
            raise ArgumentMismatch("a qreg needs at least one qubit")
        return QReg(int(value))
    size = getattr(value, "size", None)
    if isinstance(size, (int, np.integer)) and size >= 1:
        return QReg(int(size))
    raise ArgumentMismatch(f"expected a qreg, got {type(value).__name__}")


class DeferredBit:
    """A NISQ measurement result: known only after the circuit has run."""

    __slots__ = ("slot",)

    def __init__(self, slot: int | None = None):
        self.slot = slot

    def _refuse(self, *_):
        raise MeasurementDependentBranchInNisqMode(
            "control flow depends on a measurement result; run with the ftqc runtime")

    __bool__ = __int__ = __index__ = __float__ = _refuse

    def __repr__(self) -> str:
        return f"DeferredBit(slot={self.slot})"


class Scope:
    def __init__(self, parent: "Scope | None" = None):
        self.vars: dict[str, Any] = {}
        self.parent = parent

    def lookup(self, name: str) -> Any:
        s = self
        while s is not None:
            if name in s.vars:
                return s.vars[name]
            s = s.parent
        raise KeyError(name)

    def declare(self, name: str, value: Any) -> None:
        self.vars[name] = value

    def assign(self, name: str, value: Any) -> None:
        s = self
        while s is not None:
            if name in s.vars:
                s.vars[name] = value
                return
            s = s.parent
        raise KeyError(name)


_CONSTANTS = {
    "pi": math.pi, "M_PI": math.pi, "constants::pi": math.pi, "std::numbers::pi": math.pi,
    "true": True, "false": False, "e": math.e,
}
_MATH = {
    "sin": math.sin, "cos": math.cos, "tan": math.tan, "asin": math.asin, "acos": math.acos,
    "atan": math.atan, "atan2": math.atan2, "exp": math.exp, "log": math.log, "sqrt": math.sqrt,
    "pow": math.pow, "abs": abs, "fabs": abs, "floor": math.floor, "ceil": math.ceil,
    "min": min, "max": max, "complex": complex, "int": int, "double": float, "float": float,
}
_INT_TYPES = {"int", "int32_t", "int64_t", "size_t", "long", "unsigned", "short"}


def _strip_std(name: str) -> str:
    return name[5:] if name.startswith("std::") else name


Builtin = Callable[["Interpreter", list, int], tuple[str, list[Instruction]]]


class Interpreter:
    def __init__(self, resolver: Callable[[str], A.KernelDef | None],
                 builtins: dict[str, Builtin] | None = None,
                 mode: ExecutionMode = ExecutionMode.NISQ,
                 source: MeasureSource | None = None):
        self.resolver = resolver
        self.builtins = builtins if builtins is not None else _default_builtins()
        self.mode = mode
        self.source = source if mode is ExecutionMode.FTQC else None
        if mode is ExecutionMode.FTQC and source is None:
            raise EvaluationError("FTQC instantiation needs a streaming measurement source")
        self.depth = 0
        self.kernel: A.KernelDef | None = None

    # --- entry ------------------------------------------------------------------
    def instantiate(self, kdef: A.KernelDef, args: list, parent: Circuit | None = None) -> Circuit:
        circuit = Circuit(kdef.name)
        if parent is not None:
            parent.append(circuit)
        self._run(kdef, args, circuit)
        return circuit

    def _run(self, kdef: A.KernelDef, args: list, circuit: Circuit) -> None:
        if self.depth >= MAX_CALL_DEPTH:
            raise EvaluationError(f"kernel call depth exceeds {MAX_CALL_DEPTH} (recursive kernel?)")
        scope = Scope()
        for name, value in bind_arguments(kdef.signature, args).items():
            scope.declare(name, value)
        outer = self.kernel
        self.kernel = kdef
        self.depth += 1
        try:
            self._exec_block(kdef.body, scope, circuit)
        finally:
            self.depth -= 1
            self.kernel = outer

    # --- emission ---------------------------------------------------------------
    def emit(self, circuit: Circuit, inst: Instruction):
        circuit.append(inst)
        if self.source is None:
            return DeferredBit(inst.slot) if inst.kind is GateKind.Measure else None
        if inst.kind is GateKind.Measure:
            return int(self.source.measure(inst))
        self.source.apply(inst)
        return None

    def emit_all(self, circuit: Circuit, insts) -> None:
        for inst in insts:
            self.emit(circuit, inst)

    # --- statements -------------------------------------------------------------
    def _exec_block(self, body: list[A.Stmt], scope: Scope, circuit: Circuit) -> None:
        for stmt in body:
            self._exec(stmt, scope, circuit)

    def _fail(self, stmt: A.Stmt, message: str) -> EvaluationError:
        where = (self.kernel.filename if self.kernel else None) or "<kernel>"
        return EvaluationError(f"{where}:{stmt.line}: {message}")

    def _exec(self, stmt: A.Stmt, scope: Scope, circuit: Circuit) -> None:
        try:
            self._dispatch(stmt, scope, circuit)
        except QkcError:
            raise
        except KeyError as exc:
            raise self._fail(stmt, f"unknown name {exc.args[0]!r}") from None
        except (ZeroDivisionError, TypeError, ValueError, IndexError, OverflowError) as exc:
            raise self._fail(stmt, str(exc)) from None

    def _dispatch(self, stmt: A.Stmt, scope: Scope, circuit: Circuit) -> None:
        ev = lambda e: self.eval(e, scope, circuit)  # noqa: E731
        if isinstance(stmt, A.GateCall):
            qubits = tuple(self._qubit(ev(q), stmt) for q in stmt.qubits)
            params = tuple(float(ev(p)) for p in stmt.params)
            target = None if stmt.target is None else _to_int(ev(stmt.target))
            self.emit(circuit, Instruction(stmt.kind, qubits, params, target))
        elif isinstance(stmt, A.KernelCall):
            self._call(stmt, [ev(a) for a in stmt.args], scope, circuit)
        elif isinstance(stmt, A.For):
            start, end = _to_int(ev(stmt.start)), _to_int(ev(stmt.end))
            for i in range(start, end, stmt.step):
                inner = Scope(scope)
                inner.declare(stmt.var, i)
                self._exec_block(stmt.body, inner, circuit)
        elif isinstance(stmt, A.CFor):
            outer = Scope(scope)
            if stmt.init is not None:
                self._exec(stmt.init, outer, circuit)
            count = 0
            while stmt.cond is None or _truth(self.eval(stmt.cond, outer, circuit)):
                count += 1
                if count > MAX_LOOP_ITERATIONS:
                    raise self._fail(stmt, "loop iteration limit exceeded")
                self._exec_block(stmt.body, Scope(outer), circuit)
                if stmt.update is not None:
                    self._exec(stmt.update, outer, circuit)
        elif isinstance(stmt, A.ForEach):
            for item in list(ev(stmt.iterable)):
                inner = Scope(scope)
                if len(stmt.vars) == 1:
                    inner.declare(stmt.vars[0], item)
                else:
                    values = list(item)
                    if len(values) != len(stmt.vars):
                        raise self._fail(stmt, "structured binding size mismatch")
                    for n, v in zip(stmt.vars, values):
                        inner.declare(n, v)
                self._exec_block(stmt.body, inner, circuit)
        elif isinstance(stmt, A.If):
            branch = stmt.then if _truth(ev(stmt.cond)) else stmt.orelse
            self._exec_block(branch, Scope(scope), circuit)
        elif isinstance(stmt, A.LetBit):
            q = self._qubit(ev(stmt.qubit), stmt)
            scope.declare(stmt.var, self.emit(circuit, Instruction(GateKind.Measure, (q,))))
        elif isinstance(stmt, A.Decl):
            value = None if stmt.value is None else ev(stmt.value)
            scope.declare(stmt.name, _cast(stmt.type, value))
        elif isinstance(stmt, A.Assign):
            value = ev(stmt.value)
            if stmt.op != "=":
                value = _binary(stmt.op[0], scope.lookup(stmt.name), value)
            scope.assign(stmt.name, value)
        elif isinstance(stmt, A.Block):
            self._exec_block(stmt.body, Scope(scope) if stmt.scoped else scope, circuit)
        elif isinstance(stmt, A.MatrixInit):
            rows, cols = _to_int(ev(stmt.rows)), _to_int(ev(stmt.cols))
            if not (0 < rows <= MAX_MATRIX_DIM and 0 < cols <= MAX_MATRIX_DIM):
                raise self._fail(stmt, f"matrix dimensions {rows}x{cols} out of range")
            m = np.eye(rows, cols, dtype=complex) if stmt.kind == "Identity" else np.zeros((rows, cols), complex)
            scope.declare(stmt.name, m)
        elif isinstance(stmt, A.MatrixSet):
            m = scope.lookup(stmt.name)
            if not isinstance(m, np.ndarray):
                raise self._fail(stmt, f"{stmt.name!r} is not a matrix")
            i, j = _to_int(ev(stmt.row)), _to_int(ev(stmt.col))
            if not (0 <= i < m.shape[0] and 0 <= j < m.shape[1]):
                raise self._fail(stmt, f"matrix index ({i}, {j}) out of range")
            m[i, j] = complex(ev(stmt.value))
        elif isinstance(stmt, A.DecomposeBlock):
            self._decompose(stmt, scope, circuit)
        else:
            raise self._fail(stmt, f"unsupported statement {type(stmt).__name__}")

    def _qubit(self, value, stmt) -> QubitRef:
        if isinstance(value, QubitRef):
            return value
        raise self._fail(stmt, f"expected a qubit such as q[0], got {value!r}")

    def _call(self, stmt: A.KernelCall, args: list, scope: Scope, circuit: Circuit) -> None:
        kdef = self.resolver(stmt.name)
        builtin = None if kdef is not None else self.builtins.get(stmt.name)
        if kdef is None and builtin is None:
            raise UnresolvedKernel(f"{self._where(stmt)}unknown kernel {stmt.name!r}")
        if stmt.mode == "plain":
            if kdef is not None:
                child = Circuit(kdef.name)
                circuit.append(child)
                self._run(kdef, args, child)
            else:
                name, insts = builtin(self, args, stmt.line)
                child = Circuit(name)
                circuit.append(child)
                self.emit_all(child, insts)
            return
        # adjoint / ctrl: build the body without streaming, then transform
        recorder = Interpreter(self.resolver, self.builtins, ExecutionMode.NISQ)
        recorder.depth = self.depth
        body = Circuit(stmt.name)
        if kdef is not None:
            recorder.kernel = self.kernel
            recorder._run(kdef, args, body)
        else:
            _, insts = builtin(recorder, args, stmt.line)
            body.extend(insts)
        if stmt.mode == "adjoint":
            out = ir_adjoint(body)
        else:
            ctl = self.eval(stmt.ctrl, scope, circuit)
            if not isinstance(ctl, QubitRef):
                regs = [a for a in args if isinstance(a, QReg)]
                if not regs:
                    raise self._fail(stmt, "ctrl() with an integer control needs a qreg argument")
                ctl = regs[0][_to_int(ctl)]
            out = ir_controlled(body, ctl)
        child = Circuit(out.name)
        circuit.append(child)
        self.emit_all(child, out.children)

    def _where(self, stmt) -> str:
        where = (self.kernel.filename if self.kernel else None) or "<kernel>"
        return f"{where}:{stmt.line}: "

    def _decompose(self, stmt: A.DecomposeBlock, scope: Scope, circuit: Circuit) -> None:
        inner = Scope(scope)
        self._exec_block(stmt.body, inner, circuit)
        matrices = [v for v in inner.vars.values() if isinstance(v, np.ndarray)]
        if not matrices:
            raise self._fail(stmt, "decompose block does not define a UnitaryMatrix")
        target = self.eval(stmt.target, scope, circuit)
        reg = as_qreg(target) if not isinstance(target, QReg) else target
        # the register's first qubit is the most significant bit of the matrix index
        targets = list(reversed(reg.qubits()))
        tol = float(stmt.options.get("tolerance", 1e-9))
        synthesized = decompose_unitary(matrices[-1], targets, tolerance=tol)
        child = Circuit("decompose")
        circuit.append(child)
        self.emit_all(child, synthesized.children)

    # --- expressions ------------------------------------------------------------
    def eval(self, e: A.Expr, scope: Scope, circuit: Circuit):
        if isinstance(e, A.Num):
            return e.value
        if isinstance(e, A.Name):
            try:
                return scope.lookup(e.id)
            except KeyError:
                if e.id in _CONSTANTS:
                    return _CONSTANTS[e.id]
                raise
        if isinstance(e, A.BinOp):
            if e.op in ("&&", "||"):
                left = _truth(self.eval(e.left, scope, circuit))
                if (e.op == "&&") != left:
                    return left
                return _truth(self.eval(e.right, scope, circuit))
            return _binary(e.op, self.eval(e.left, scope, circuit), self.eval(e.right, scope, circuit))
        if isinstance(e, A.UnaryOp):
            v = self.eval(e.operand, scope, circuit)
            if isinstance(v, DeferredBit):
                return DeferredBit()
            return (not v) if e.op == "!" else -v
        if isinstance(e, A.Index):
            base = self.eval(e.base, scope, circuit)
            idx = self.eval(e.index, scope, circuit)
            return base[_to_int(idx)]
        if isinstance(e, A.Method):
            obj = self.eval(e.obj, scope, circuit)
            if e.name == "size" and not e.args:
                return obj.size if isinstance(obj, QReg) else len(obj)
            raise EvaluationError(f"unsupported method {e.name}()")
        if isinstance(e, A.Call):
            return self._eval_call(e, scope, circuit)
        if isinstance(e, A.Str):
            return e.value
        raise EvaluationError(f"cannot evaluate {e!r}")

    def _eval_call(self, e: A.Call, scope: Scope, circuit: Circuit):
        args = [self.eval(a, scope, circuit) for a in e.args]
        name = _strip_std(e.func)
        if name == "__select__":
            return args[1] if _truth(args[0]) else args[2]
        if name in ("X", "Y", "Z") and len(args) == 1:
            from ..hybrid.pauli import PauliOperator
            return PauliOperator.single(name, _to_int(args[0]))
        if name == "Measure" and len(args) == 1 and isinstance(args[0], QubitRef):
            return self.emit(circuit, Instruction(GateKind.Measure, (args[0],)))
        if name == "enumerate" and len(args) == 1:
            return list(enumerate(args[0]))
        if name == "linspace" and len(args) == 3:
            return list(np.linspace(float(args[0]), float(args[1]), _to_int(args[2])))
        if name in _MATH:
            return _MATH[name](*args)
        raise EvaluationError(f"unknown function {e.func!r}")


def _truth(v) -> bool:
    return bool(v)


def _to_int(v) -> int:
    if isinstance(v, DeferredBit):
        v._refuse()
    if isinstance(v, float):
        if not v.is_integer():
            raise EvaluationError(f"expected an integer, got {v}")
        return int(v)
    return int(v)


def _cast(type_str: str, value):
    if value is None or isinstance(value, DeferredBit):
        return value
    words = set(type_str.split())
    if words & _INT_TYPES and not isinstance(value, (list, np.ndarray)):
        return int(value)
    if words & {"double", "float"} and not isinstance(value, (list, np.ndarray)):
        return float(value)
    if "bool" in words:
        return bool(value)
    return value


def _binary(op: str, a, b):
    if isinstance(a, DeferredBit) or isinstance(b, DeferredBit):
        return DeferredBit()
    ints = isinstance(a, (int, np.integer)) and isinstance(b, (int, np.integer))
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        if ints:
            if b == 0:
                raise ZeroDivisionError("integer division by zero")
            q = abs(int(a)) // abs(int(b))
            return q if (a >= 0) == (b >= 0) else -q
        return a / b
    if op == "%":
        if b == 0:
            raise ZeroDivisionError("modulo by zero")
        return int(math.fmod(a, b)) if ints else math.fmod(a, b)
    if op == "<<":
        return int(a) << int(b)
    if op == ">>":
        return int(a) >> int(b)
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op == ">":
        return a > b
    if op == ">=":
        return a >= b
    if op == "==":
        return a == b
    if op == "!=":
        return a != b
    raise EvaluationError(f"unsupported operator {op!r}")


def bind_arguments(sig: A.KernelSignature, args: list) -> dict[str, Any]:
    if len(args) != len(sig.params):
        raise ArgumentMismatch(
            f"kernel {sig.name!r} takes {len(sig.params)} argument(s), got {len(args)}")
    bound: dict[str, Any] = {}
    for p, v in zip(sig.params, args):
        try:
            bound[p.name] = _coerce(p.type, v)
        except (TypeError, ValueError) as exc:
            raise ArgumentMismatch(f"argument {p.name!r} of {sig.name!r}: {exc}") from None
    return bound


def _coerce(t: A.ParamType, v):
    if t is A.ParamType.QREG:
        return as_qreg(v)
    if t is A.ParamType.REAL:
        if isinstance(v, (list, tuple, np.ndarray, str)):
            raise TypeError(f"expected a real number, got {type(v).__name__}")
        return float(v)
    if t is A.ParamType.INT:
        if isinstance(v, float) and not v.is_integer() or isinstance(v, (list, tuple, str)):
            raise TypeError(f"expected an integer, got {v!r}")
        return int(v)
    if isinstance(v, (str, bytes)) or not hasattr(v, "__iter__"):
        raise TypeError(f"expected a vector, got {type(v).__name__}")
    conv = float if t is A.ParamType.REAL_VECTOR else int
    return [conv(x) for x in v]


def _default_builtins() -> dict[str, Builtin]:
    from .stdlib import BUILTINS
    return BUILTINS


def instantiate(kdef: A.KernelDef, args: list, parent: Circuit | None = None,
                mode: ExecutionMode | str = ExecutionMode.NISQ,
                measure_source: MeasureSource | None = None,
                resolver: Callable[[str], A.KernelDef | None] | None = None) -> Circuit:
    """Interpret ``kdef`` with ``args``; the result is appended to ``parent`` when given."""
    if resolver is None:
        from .registry import default_registry
        resolver = default_registry().lookup
    interp = Interpreter(resolver, mode=ExecutionMode.parse(mode), source=measure_source)
    return interp.instantiate(kdef, list(args), parent)

"""OpenQASM 2 statements mapped onto the kernel's qreg parameter.

``qreg`` declarations alias consecutive slices of the kernel's first qreg
argument, and ``creg`` declarations allocate consecutive classical slots, so
``measure q -> c`` writes bit ``i`` of ``c`` to result position ``i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import UnsupportedQasmFeature
from ..ir.gates import GateKind
from .ast import BinOp, Expr, For, GateCall, Index, Method, Name, Num, Stmt
from .lexer import EOF, IDENT, OP

_QASM_GATES = {
    "h": GateKind.H, "x": GateKind.X, "y": GateKind.Y, "z": GateKind.Z,
    "s": GateKind.S, "sdg": GateKind.Sdg, "t": GateKind.T, "tdg": GateKind.Tdg,
    "rx": GateKind.Rx, "ry": GateKind.Ry, "rz": GateKind.Rz,
    "u1": GateKind.U1, "p": GateKind.U1, "u3": GateKind.U3, "u": GateKind.U3, "U": GateKind.U3,
    "cx": GateKind.CX, "CX": GateKind.CX, "cy": GateKind.CY, "cz": GateKind.CZ,
    "ch": GateKind.CH, "crz": GateKind.CRz, "cu1": GateKind.CPhase, "cp": GateKind.CPhase,
    "swap": GateKind.Swap,
}
_UNSUPPORTED = {"gate", "opaque", "if"}


@dataclass
class _Register:
    kernel_param: str
    offset: int
    size: int | None  # None: the whole kernel register (size known only at run time)


def toffoli_calls(a: Expr, b: Expr, c: Expr, line: int) -> list[Stmt]:
    """The exact 6-CX Toffoli network as gate-call statements."""
    H, CX, T, Tdg = GateKind.H, GateKind.CX, GateKind.T, GateKind.Tdg
    seq = [
        (H, c), (CX, b, c), (Tdg, c), (CX, a, c), (T, c), (CX, b, c), (Tdg, c), (CX, a, c),
        (T, b), (T, c), (H, c), (CX, a, b), (T, a), (Tdg, b), (CX, a, b),
    ]
    return [GateCall(kind, list(qs), line=line) for kind, *qs in seq]


class QasmMixin:
    def reset_qasm_state(self) -> None:
        self.qasm_qregs: dict[str, _Register] = {}
        self.qasm_cregs: dict[str, tuple[int, int]] = {}
        self._qreg_offset = 0
        self._creg_offset = 0

    def qasm_statement(self) -> list[Stmt]:
        tok = self.peek()
        line = self.line_of(tok)
        if tok.kind == OP and tok.value == ";":
            self.next()
            return []
        if tok.kind != IDENT:
            raise self.error(f"unexpected {tok.value!r} in OpenQASM", tok)
        word = tok.value
        if word in _UNSUPPORTED:
            raise self.error(f"OpenQASM '{word}' is not supported", tok, UnsupportedQasmFeature)
        if word == "OPENQASM":
            self.next()
            self.next()
            self.expect(";")
            return []
        if word == "include":
            self.next()
            self.next()
            self.expect(";")
            return []
        if word in ("qreg", "creg"):
            self.next()
            name = self.expect_ident().value
            self.expect("[")
            size = self.expect_int()
            self.expect("]")
            self.expect(";")
            if word == "qreg":
                self.qasm_qregs[name] = _Register(self.first_qreg(tok), self._qreg_offset, size)
                self._qreg_offset += size
            else:
                self.qasm_cregs[name] = (self._creg_offset, size)
                self._creg_offset += size
            return []
        if word == "barrier":
            while not self.at_op(";"):
                if self.peek().kind == EOF:
                    raise self.error("unterminated barrier", tok)
                self.next()
            self.next()
            return []
        if word == "measure":
            self.next()
            q = self._qasm_arg()
            self.expect("->")
            c = self._qasm_carg()
            self.expect(";")
            return self._broadcast(GateKind.Measure, [q], [], line, carg=c)
        if word == "reset":
            self.next()
            q = self._qasm_arg()
            self.expect(";")
            return self._broadcast(GateKind.Reset, [q], [], line)
        self.next()
        params: list[Expr] = []
        if self.at_op("("):
            params = self.parse_args()
        args = [self._qasm_arg()]
        while self.accept(","):
            args.append(self._qasm_arg())
        self.expect(";")
        if word == "id":
            return []
        if word == "ccx":
            if len(args) != 3 or params:
                raise self.error("ccx takes three qubits", tok)
            return self._broadcast("ccx", args, [], line)
        if word == "u2":
            if len(params) != 2:
                raise self.error("u2 takes two parameters", tok)
            return self._broadcast(GateKind.U3, args, [Num(math.pi / 2)] + params, line)
        kind = _QASM_GATES.get(word)
        if kind is None:
            raise self.error(f"unknown OpenQASM gate {word!r}", tok, UnsupportedQasmFeature)
        if len(args) != kind.arity or len(params) != kind.n_params:
            raise self.error(f"{word} takes {kind.arity} qubit(s) and {kind.n_params} parameter(s)", tok)
        return self._broadcast(kind, args, params, line)

    def _qasm_arg(self) -> tuple[_Register, Expr | None]:
        tok = self.expect_ident()
        reg = self.qasm_qregs.get(tok.value)
        if reg is None:
            if self.signature and any(p.name == tok.value for p in self.signature.qreg_params):
                reg = _Register(tok.value, 0, None)
            else:
                raise self.error(f"undeclared quantum register {tok.value!r}", tok)
        idx = None
        if self.accept("["):
            idx = self.parse_expr()
            self.expect("]")
        return reg, idx

    def _qasm_carg(self) -> tuple[int, int, Expr | None]:
        tok = self.expect_ident()
        if tok.value not in self.qasm_cregs:
            raise self.error(f"undeclared classical register {tok.value!r}", tok)
        offset, size = self.qasm_cregs[tok.value]
        idx = None
        if self.accept("["):
            idx = self.parse_expr()
            self.expect("]")
        return offset, size, idx

    def _broadcast(self, kind, args, params, line, carg=None) -> list[Stmt]:
        whole = [reg for reg, idx in args if idx is None]
        var = self.fresh_name("i") if whole or (carg and carg[2] is None) else None

        def qubit(reg: _Register, idx: Expr | None) -> Expr:
            i = Name(var) if idx is None else idx
            if reg.offset:
                i = BinOp("+", Num(reg.offset), i)
            return Index(Name(reg.kernel_param), i)

        qubits = [qubit(r, i) for r, i in args]
        target = None
        if carg is not None:
            offset, _, cidx = carg
            ci = Name(var) if cidx is None else cidx
            target = BinOp("+", Num(offset), ci) if offset else ci
        if kind == "ccx":
            body = toffoli_calls(*qubits, line)
        else:
            body = [GateCall(kind, qubits, list(params), target, line=line)]
        if var is None:
            return body
        sizes = {r.size for r in whole}
        if carg is not None and carg[2] is None:
            sizes.add(carg[1])
        if len(sizes) > 1 and None not in sizes:
            raise self.error("broadcast over registers of different sizes")
        known = [s for s in sizes if s is not None]
        if known:
            end: Expr = Num(known[0])
        else:
            end = Method(Name(whole[0].kernel_param), "size", ())
        return [For(var, Num(0), end, 1, body, line=line)]


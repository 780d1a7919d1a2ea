"""Line-oriented Quil statements.

Integer qubit labels index the kernel's first qreg argument.  ``MEASURE q
ro[i]`` writes classical slot ``i``; ``DECLARE`` lines are accepted and ignored
because slots are positional.
"""

from __future__ import annotations

from ..errors import UnsupportedQuilFeature
from ..ir.gates import GateKind
from .ast import Expr, GateCall, Index, Name, Num, Stmt
from .lexer import EOF, IDENT, NUMBER, OP
from .openqasm import toffoli_calls

_QUIL_GATES = {
    "H": GateKind.H, "X": GateKind.X, "Y": GateKind.Y, "Z": GateKind.Z,
    "S": GateKind.S, "T": GateKind.T, "RX": GateKind.Rx, "RY": GateKind.Ry, "RZ": GateKind.Rz,
    "PHASE": GateKind.U1, "CNOT": GateKind.CX, "CZ": GateKind.CZ, "CPHASE": GateKind.CPhase,
    "SWAP": GateKind.Swap,
}
_UNSUPPORTED = {
    "DEFGATE", "DEFCIRCUIT", "JUMP", "JUMP-WHEN", "JUMP-UNLESS", "LABEL", "WAIT",
    "DAGGER", "CONTROLLED", "FORKED", "MOVE", "LOAD", "STORE", "ADD", "SUB", "MUL", "DIV",
    "EXCHANGE", "CONVERT", "NOT", "AND", "IOR", "XOR", "EQ", "GT", "GE", "LT", "LE", "DEFFRAME",
    "DEFWAVEFORM", "DEFCAL", "PULSE", "CAPTURE", "DELAY", "FENCE",
}


class QuilMixin:
    def quil_statement(self) -> list[Stmt]:
        first = self.peek()
        line_no = first.line
        line = self.line_of(first)
        if first.kind == OP and first.value == ";":
            self.next()
            return []
        if first.kind != IDENT:
            raise self.error(f"unexpected {first.value!r} in Quil", first)
        word = first.value.upper()
        if word in _UNSUPPORTED:
            raise self.error(f"Quil '{first.value}' is not supported", first, UnsupportedQuilFeature)
        self.next()
        if word in ("DECLARE", "PRAGMA", "HALT", "NOP"):
            self._skip_line(line_no)
            return []
        params: list[Expr] = []
        if self.at_op("(") and self.peek().line == line_no:
            params = self.parse_args()
        qubits = []
        while self.peek().kind == NUMBER and self.peek().line == line_no:
            qubits.append(self._quil_qubit())
        target = None
        if word == "MEASURE":
            if len(qubits) != 1:
                raise self.error("MEASURE takes one qubit", first)
            if self.peek().kind == IDENT and self.peek().line == line_no:
                self.next()
                if self.accept("["):
                    target = Num(self.expect_int())
                    self.expect("]")
                else:
                    target = Num(0)
            self._end_line(line_no)
            return [GateCall(GateKind.Measure, qubits, [], target, line=line)]
        self._end_line(line_no)
        if word == "I":
            return []
        if word == "RESET":
            if len(qubits) != 1:
                raise self.error("RESET needs exactly one qubit in this subset", first,
                                 UnsupportedQuilFeature)
            return [GateCall(GateKind.Reset, qubits, line=line)]
        if word == "CCNOT":
            if len(qubits) != 3 or params:
                raise self.error("CCNOT takes three qubits", first)
            return toffoli_calls(*qubits, line)
        kind = _QUIL_GATES.get(word)
        if kind is None:
            raise self.error(f"unknown Quil instruction {first.value!r}", first, UnsupportedQuilFeature)
        if len(qubits) != kind.arity or len(params) != kind.n_params:
            raise self.error(f"{word} takes {kind.arity} qubit(s) and {kind.n_params} parameter(s)", first)
        return [GateCall(kind, qubits, params, line=line)]

    def _quil_qubit(self) -> Expr:
        tok = self.peek()
        if not tok.value.isdigit():
            raise self.error("Quil qubit labels must be non-negative integers", tok)
        self.next()
        return Index(Name(self.first_qreg(tok)), Num(int(tok.value)))

    def _end_line(self, line_no: int) -> None:
        tok = self.peek()
        if tok.kind == OP and tok.value == ";":
            self.next()
            return
        if tok.kind == EOF or tok.line != line_no or (tok.kind == OP and tok.value == "}"):
            return
        raise self.error(f"unexpected {tok.value!r} at end of Quil instruction", tok)

    def _skip_line(self, line_no: int) -> None:
        while True:
            tok = self.peek()
            if tok.kind == EOF or tok.line != line_no or (tok.kind == OP and tok.value == "}"):
                return
            self.next()
            if tok.kind == OP and tok.value == ";":
                return

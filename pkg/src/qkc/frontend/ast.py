"""Kernel signatures and the restricted classical-control AST."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Union


class SourceLanguage(Enum):
    XASM = "xasm"
    OPENQASM = "openqasm"
    QUIL = "quil"
    DECOMPOSE = "decompose"


class ParamType(Enum):
    QREG = "qreg"
    REAL = "real"
    INT = "int"
    REAL_VECTOR = "real-vector"
    INT_VECTOR = "int-vector"


@dataclass(frozen=True)
class Param:
    name: str
    type: ParamType


@dataclass(frozen=True)
class KernelSignature:
    name: str
    params: tuple[Param, ...]

    @property
    def qreg_params(self) -> list[Param]:
        return [p for p in self.params if p.type is ParamType.QREG]


# --- expressions ------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: float | int


@dataclass(frozen=True)
class Str:
    value: str


@dataclass(frozen=True)
class Name:
    id: str


@dataclass(frozen=True)
class Index:
    base: "Expr"
    index: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple["Expr", ...]


@dataclass(frozen=True)
class Method:
    obj: "Expr"
    name: str
    args: tuple["Expr", ...]


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class UnaryOp:
    op: str
    operand: "Expr"


Expr = Union[Num, Str, Name, Index, Call, Method, BinOp, UnaryOp]


# --- statements ---------------------------------------------------------------

@dataclass
class Stmt:
    line: int = field(default=0, kw_only=True)


@dataclass
class GateCall(Stmt):
    kind: object  # GateKind; kept untyped to avoid a hard import cycle in annotations
    qubits: list[Expr]
    params: list[Expr] = field(default_factory=list)
    target: Expr | None = None


@dataclass
class KernelCall(Stmt):
    name: str
    args: list[Expr]
    mode: str = "plain"  # plain | adjoint | ctrl
    ctrl: Expr | None = None


@dataclass
class For(Stmt):
    var: str
    start: Expr
    end: Expr
    step: int
    body: list[Stmt]


@dataclass
class CFor(Stmt):
    """A C-style loop that does not fit the counted ``For`` shape."""
    init: Stmt | None
    cond: Expr | None
    update: Stmt | None
    body: list[Stmt]


@dataclass
class ForEach(Stmt):
    vars: list[str]
    iterable: Expr
    body: list[Stmt]


@dataclass
class If(Stmt):
    cond: Expr
    then: list[Stmt]
    orelse: list[Stmt] = field(default_factory=list)


@dataclass
class LetBit(Stmt):
    var: str
    qubit: Expr


@dataclass
class Decl(Stmt):
    name: str
    type: str
    value: Expr | None


@dataclass
class Assign(Stmt):
    name: str
    op: str
    value: Expr


@dataclass
class MatrixInit(Stmt):
    name: str
    kind: str  # Identity | Zero
    rows: Expr
    cols: Expr


@dataclass
class MatrixSet(Stmt):
    name: str
    row: Expr
    col: Expr
    value: Expr


@dataclass
class DecomposeBlock(Stmt):
    body: list[Stmt]
    target: Expr
    options: dict[str, object] = field(default_factory=dict)


@dataclass
class Block(Stmt):
    body: list[Stmt]
    scoped: bool = True


@dataclass
class KernelDef:
    signature: KernelSignature
    body: list[Stmt]
    source_language_trace: list[tuple[SourceLanguage, int]] = field(default_factory=list)
    filename: str | None = None

    @property
    def name(self) -> str:
        return self.signature.name

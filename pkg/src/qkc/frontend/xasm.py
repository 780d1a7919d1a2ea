"""XASM statements: gate calls plus a C-like classical subset."""

from __future__ import annotations

from ..ir.gates import gate_from_name
from .ast import (
    Assign, BinOp, Block, CFor, Call, Decl, DecomposeBlock, For, ForEach, GateCall, If,
    KernelCall, LetBit, MatrixInit, MatrixSet, Name, Num, SourceLanguage, Stmt,
)
from .lexer import EOF, IDENT, NUMBER, OP, STRING

TYPE_WORDS = {
    "const", "constexpr", "auto", "int", "double", "float", "bool", "int32_t", "int64_t",
    "size_t", "unsigned", "long", "short", "UnitaryMatrix", "static",
}
_ASSIGN_OPS = ("=", "+=", "-=", "*=", "/=")
_MATRIX_CTORS = {"UnitaryMatrix::Identity": "Identity", "UnitaryMatrix::Zero": "Zero"}
SYNTHESIS_METHODS = ("givens",)


class XasmMixin:
    def xasm_statement(self) -> list[Stmt]:
        tok = self.peek()
        line = self.line_of(tok)
        if tok.kind == OP and tok.value == ";":
            self.next()
            return []
        if tok.kind == OP and tok.value == "{":
            return [Block(self.xasm_block(), line=line)]
        if tok.kind == OP and tok.value in ("++", "--"):
            stmt = self.xasm_simple()
            self.expect(";")
            return [stmt]
        if tok.kind != IDENT:
            raise self.error(f"unexpected {tok.value!r} at start of statement", tok)
        word = tok.value
        if word == "for":
            return [self.xasm_for()]
        if word == "if":
            return [self.xasm_if()]
        if word == "decompose":
            return [self.xasm_decompose()]
        if word == "else":
            raise self.error("'else' without matching 'if'", tok)
        stmt = self.xasm_simple()
        self.expect(";")
        return [] if stmt is None else [stmt]

    def xasm_block(self) -> list[Stmt]:
        """A braced block or a single statement; language switches stay local."""
        if self.at_op("{"):
            self.next()
            body = self.parse_statements(SourceLanguage.XASM)
            self.expect("}")
            return body
        return self.xasm_statement()

    def _at_type(self) -> bool:
        tok = self.peek()
        if tok.kind != IDENT:
            return False
        if tok.value in TYPE_WORDS:
            return True
        return tok.value == "std" and self.at_op("::", 1)

    def _parse_type(self) -> str:
        words: list[str] = []
        while True:
            tok = self.peek()
            if tok.kind == IDENT and tok.value in TYPE_WORDS:
                words.append(self.next().value)
            elif tok.kind == IDENT and tok.value == "std" and self.at_op("::", 1):
                self.next()
                self.next()
                words.append(self.expect_ident().value)
                if self.at_op("<"):
                    depth = 0
                    while True:
                        t = self.next()
                        if t.kind == EOF:
                            raise self.error("unterminated template argument list", t)
                        if t.value == "<":
                            depth += 1
                        elif t.value == ">":
                            depth -= 1
                        elif t.value == ">>":
                            depth -= 2
                        elif t.kind == IDENT:
                            words.append(t.value)
                        if depth <= 0:
                            break
            elif tok.kind == OP and tok.value in ("&", "*") and words:
                self.next()
            else:
                break
        return " ".join(words)

    def xasm_simple(self) -> Stmt | None:
        """A declaration, assignment, increment or call, without the trailing ';'."""
        tok = self.peek()
        line = self.line_of(tok)
        if tok.kind == OP and tok.value in ("++", "--"):
            self.next()
            name = self.expect_ident().value
            return Assign(name, "+=" if tok.value == "++" else "-=", Num(1), line=line)
        if self._at_type():
            return self._declaration(line)
        name_tok = self.expect_ident()
        name = name_tok.value
        if self.at_op("::") and self.peek(1).kind == IDENT and self.peek(1).value in ("adjoint", "ctrl"):
            self.next()
            mode = self.next().value
            args = self.parse_args()
            if mode == "ctrl":
                if not args:
                    raise self.error("ctrl() needs a control argument", name_tok)
                return KernelCall(name, args[1:], mode="ctrl", ctrl=args[0], line=line)
            return KernelCall(name, args, mode="adjoint", line=line)
        while self.at_op("::") and self.peek(1).kind == IDENT:
            self.next()
            name += "::" + self.next().value
        if self.at_op("("):
            args = self.parse_args()
            if self.at_op("="):
                self.next()
                if len(args) != 2:
                    raise self.error("matrix element assignment takes (row, col)", name_tok)
                return MatrixSet(name, args[0], args[1], self.parse_expr(), line=line)
            return self._call_statement(name, args, name_tok, line)
        nxt = self.peek()
        if nxt.kind == OP and nxt.value in _ASSIGN_OPS:
            self.next()
            return Assign(name, nxt.value, self.parse_expr(), line=line)
        if nxt.kind == OP and nxt.value in ("++", "--"):
            self.next()
            return Assign(name, "+=" if nxt.value == "++" else "-=", Num(1), line=line)
        raise self.error(f"unexpected {nxt.value!r} after {name!r}", nxt)

    def _call_statement(self, name, args, tok, line) -> Stmt:
        kind = gate_from_name(name)
        if kind is None:
            return KernelCall(name, args, line=line)
        arity, n_params = kind.arity, kind.n_params
        if len(args) != arity + n_params:
            raise self.error(
                f"{name} expects {arity} qubit(s) and {n_params} angle(s), got {len(args)} argument(s)", tok)
        return GateCall(kind, list(args[:arity]), list(args[arity:]), line=line)

    def _declaration(self, line: int) -> Stmt | None:
        type_str = self._parse_type()
        decls: list[Stmt] = []
        while True:
            name_tok = self.expect_ident()
            value = None
            if self.accept("="):
                value = self.parse_expr()
            elif self.at_op("("):
                # constructor-style initialisation: int x(3);
                args = self.parse_args()
                value = args[0] if len(args) == 1 else Call(type_str, tuple(args))
            decls.append(self._make_decl(name_tok, type_str, value, line))
            if not self.accept(","):
                break
        if len(decls) == 1:
            return decls[0]
        return Block(decls, scoped=False, line=line)

    def _make_decl(self, name_tok, type_str, value, line) -> Stmt:
        name = name_tok.value
        if isinstance(value, Call) and value.func == "Measure":
            if len(value.args) != 1:
                raise self.error("Measure takes one qubit", name_tok)
            return LetBit(name, value.args[0], line=line)
        if "UnitaryMatrix" in type_str.split():
            if not (isinstance(value, Call) and value.func in _MATRIX_CTORS and len(value.args) == 2):
                raise self.error("UnitaryMatrix must be initialised with "
                                 "UnitaryMatrix::Identity(r, c) or UnitaryMatrix::Zero(r, c)", name_tok)
            return MatrixInit(name, _MATRIX_CTORS[value.func], value.args[0], value.args[1], line=line)
        return Decl(name, type_str, value, line=line)

    # control flow
    def xasm_for(self) -> Stmt:
        tok = self.expect("for")
        line = self.line_of(tok)
        self.expect("(")
        if self._is_range_for():
            self._parse_type()
            if self.accept("["):
                names = [self.expect_ident().value]
                while self.accept(","):
                    names.append(self.expect_ident().value)
                self.expect("]")
            else:
                names = [self.expect_ident().value]
            self.expect(":")
            iterable = self.parse_expr()
            self.expect(")")
            return ForEach(names, iterable, self.xasm_block(), line=line)
        init = None if self.at_op(";") else self.xasm_simple()
        self.expect(";")
        cond = None if self.at_op(";") else self.parse_expr()
        self.expect(";")
        update = None if self.at_op(")") else self.xasm_simple()
        self.expect(")")
        body = self.xasm_block()
        counted = _counted_loop(init, cond, update)
        if counted is not None:
            var, start, end, step = counted
            return For(var, start, end, step, body, line=line)
        return CFor(init, cond, update, body, line=line)

    def _is_range_for(self) -> bool:
        depth = 0
        k = 0
        while True:
            tok = self.peek(k)
            if tok.kind == EOF:
                return False
            if tok.kind == OP:
                if tok.value in ("(", "["):
                    depth += 1
                elif tok.value in (")", "]"):
                    if depth == 0:
                        return False
                    depth -= 1
                elif tok.value == ";" and depth == 0:
                    return False
                elif tok.value == ":" and depth == 0:
                    return True
            k += 1

    def xasm_if(self) -> Stmt:
        tok = self.expect("if")
        self.expect("(")
        cond = self.parse_expr()
        self.expect(")")
        then = self.xasm_block()
        orelse: list[Stmt] = []
        if self.accept("else"):
            orelse = self.xasm_block()
        return If(cond, then, orelse, line=self.line_of(tok))

    def xasm_decompose(self) -> Stmt:
        tok = self.expect("decompose")
        self.expect("{")
        body = self.parse_statements(SourceLanguage.XASM)
        self.expect("}")
        self.expect("(")
        target = self.parse_expr()
        options: dict[str, object] = {}
        while self.accept(","):
            key = self.expect_ident()
            self.expect("=")
            vtok = self.next()
            if vtok.kind == NUMBER:
                value: object = float(vtok.value)
            elif vtok.kind in (STRING, IDENT):
                value = vtok.value
            else:
                raise self.error("option values must be numbers, strings or names", vtok)
            options[key.value] = value
        self.expect(")")
        self.expect(";")
        method = str(options.get("method", "givens")).lower()
        if method not in SYNTHESIS_METHODS:
            raise self.error(f"unsupported synthesis method {method!r}; available: "
                             + ", ".join(SYNTHESIS_METHODS), tok)
        if "tolerance" in options and not isinstance(options["tolerance"], float):
            raise self.error("tolerance must be a number", tok)
        self.trace.append((SourceLanguage.DECOMPOSE, self.line_of(tok)))
        return DecomposeBlock(body, target, options, line=self.line_of(tok))


def _counted_loop(init, cond, update):
    """Recognise ``for (int i = a; i < b; ++i)`` style loops."""
    if isinstance(init, Decl) and init.value is not None:
        var, start = init.name, init.value
    elif isinstance(init, Assign) and init.op == "=":
        var, start = init.name, init.value
    else:
        return None
    if not (isinstance(cond, BinOp) and cond.op in ("<", "<=", ">", ">=")
            and cond.left == Name(var)):
        return None
    if not (isinstance(update, Assign) and update.name == var and update.op in ("+=", "-=")
            and update.value == Num(1)):
        return None
    step = 1 if update.op == "+=" else -1
    end = cond.right
    if cond.op in ("<", "<=") and step != 1 or cond.op in (">", ">=") and step != -1:
        return None
    if cond.op == "<=":
        end = BinOp("+", end, Num(1))
    elif cond.op == ">=":
        end = BinOp("-", end, Num(1))
    return var, start, end, step


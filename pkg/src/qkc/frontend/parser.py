"""Kernel-file parser.

Source text is preprocessed (``#include`` splicing), tokenized once, and then
walked by a recursive-descent parser whose statement grammar depends on the
active language.  ``using qk::<lang>;`` (or ``using qcor::<lang>;``) switches
languages at statement boundaries; a switch made inside a braced block lasts
until that block closes.
"""

from __future__ import annotations

import os
import re
from pathlib import Path

from ..errors import FrontendError, KernelSyntaxError, UnbalancedBraces, UnknownLanguage
from .ast import (
    BinOp, Call, Expr, KernelDef, KernelSignature, Index, Method, Name, Num, Param,
    ParamType, SourceLanguage, Stmt, Str, UnaryOp,
)
from .lexer import EOF, IDENT, NUMBER, OP, STRING, Token, tokenize

MAX_INCLUDE_DEPTH = 16
_INCLUDE_RE = re.compile(r'^\s*#\s*include\s*[<"]([^">]+)[">]')
_HEADER_SUFFIXES = (".hpp", ".h", ".hh", ".hxx")
_LANG_NAMES = {lang.value: lang for lang in SourceLanguage}
_LANG_NAMES["qasm"] = SourceLanguage.OPENQASM


# --- preprocessing ------------------------------------------------------------

def preprocess(source: str, filename: str | None = None,
               base_dir: str | os.PathLike | None = None) -> tuple[str, list[tuple[str | None, int]]]:
    """Splice ``#include "file"`` directives.

    Returns the expanded text and, for every output line, the ``(file, line)``
    it came from.  Header includes (``.hpp``/``.h``) name the built-in standard
    library and expand to nothing.
    """
    if base_dir is None:
        base_dir = Path(filename).parent if filename else Path.cwd()
    out: list[str] = []
    origins: list[tuple[str | None, int]] = []
    _splice(source, filename, Path(base_dir), out, origins, 0)
    return "\n".join(out), origins


def _splice(text: str, filename: str | None, base: Path, out: list[str],
            origins: list[tuple[str | None, int]], depth: int) -> None:
    for lineno, line in enumerate(text.split("\n"), start=1):
        m = _INCLUDE_RE.match(line)
        if not m:
            out.append(line)
            origins.append((filename, lineno))
            continue
        target = m.group(1)
        if target.endswith(_HEADER_SUFFIXES):
            out.append("")
            origins.append((filename, lineno))
            continue
        if depth >= MAX_INCLUDE_DEPTH:
            raise KernelSyntaxError("include nesting too deep", lineno, 1, filename)
        path = base / target
        try:
            included = path.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            raise KernelSyntaxError(f"cannot include {target!r}: {exc}", lineno,
                                    line.find("#") + 1, filename) from None
        _splice(included, str(path), path.parent, out, origins, depth + 1)


# --- token stream -------------------------------------------------------------

class TokenStream:
    def __init__(self, tokens: list[Token], origins: list[tuple[str | None, int]] | None = None,
                 filename: str | None = None):
        self.tokens = tokens
        self.pos = 0
        self.origins = origins or []
        self.filename = filename

    # location helpers
    def where(self, tok: Token) -> tuple[str | None, int]:
        if 0 < tok.line <= len(self.origins):
            return self.origins[tok.line - 1]
        return self.filename, tok.line

    def error(self, message: str, tok: Token | None = None, cls=KernelSyntaxError) -> KernelSyntaxError:
        tok = tok or self.peek()
        fname, line = self.where(tok)
        return cls(message, line, tok.col, fname)

    def line_of(self, tok: Token) -> int:
        return self.where(tok)[1]

    # cursor
    def peek(self, k: int = 0) -> Token:
        i = min(self.pos + k, len(self.tokens) - 1)
        return self.tokens[i]

    def next(self) -> Token:
        tok = self.peek()
        if tok.kind != EOF:
            self.pos += 1
        return tok

    def at(self, value: str, k: int = 0) -> bool:
        tok = self.peek(k)
        return tok.kind in (OP, IDENT) and tok.value == value

    def at_op(self, value: str, k: int = 0) -> bool:
        tok = self.peek(k)
        return tok.kind == OP and tok.value == value

    def accept(self, value: str) -> bool:
        if self.at(value):
            self.next()
            return True
        return False

    def expect(self, value: str) -> Token:
        tok = self.peek()
        if tok.kind in (OP, IDENT) and tok.value == value:
            return self.next()
        if tok.kind == EOF and value == "}":
            raise self.error("missing '}' before end of input", tok, UnbalancedBraces)
        raise self.error(f"expected {value!r}, found {_describe(tok)}", tok)

    def expect_ident(self) -> Token:
        tok = self.peek()
        if tok.kind != IDENT:
            raise self.error(f"expected identifier, found {_describe(tok)}", tok)
        return self.next()

    def expect_int(self) -> int:
        tok = self.peek()
        if tok.kind != NUMBER or not tok.value.isdigit():
            raise self.error(f"expected integer, found {_describe(tok)}", tok)
        self.next()
        return int(tok.value)

    # expressions (C-like precedence)
    _BINARY_LEVELS = (
        ("||",), ("&&",), ("==", "!="), ("<", "<=", ">", ">="), ("<<", ">>"),
        ("+", "-"), ("*", "/", "%"),
    )

    def parse_expr(self) -> Expr:
        cond = self._binary(0)
        if self.at_op("?"):
            self.next()
            a = self.parse_expr()
            self.expect(":")
            b = self.parse_expr()
            return Call("__select__", (cond, a, b))
        return cond

    def _binary(self, level: int) -> Expr:
        if level == len(self._BINARY_LEVELS):
            return self._unary()
        left = self._binary(level + 1)
        ops = self._BINARY_LEVELS[level]
        while self.peek().kind == OP and self.peek().value in ops:
            op = self.next().value
            right = self._binary(level + 1)
            left = BinOp(op, left, right)
        return left

    def _unary(self) -> Expr:
        tok = self.peek()
        if tok.kind == OP and tok.value in ("-", "+", "!"):
            self.next()
            operand = self._unary()
            if tok.value == "-" and isinstance(operand, Num):
                return Num(-operand.value)
            return operand if tok.value == "+" else UnaryOp(tok.value, operand)
        return self._postfix()

    def _postfix(self) -> Expr:
        expr = self._primary()
        while True:
            if self.at_op("["):
                self.next()
                idx = self.parse_expr()
                self.expect("]")
                expr = Index(expr, idx)
            elif self.at_op(".") and self.peek(1).kind == IDENT:
                self.next()
                name = self.next().value
                args = self.parse_args() if self.at_op("(") else ()
                expr = Method(expr, name, tuple(args))
            else:
                return expr

    def _primary(self) -> Expr:
        tok = self.peek()
        if tok.kind == NUMBER:
            self.next()
            v = tok.value
            if v.isdigit():
                return Num(int(v))
            try:
                return Num(float(v))
            except ValueError:
                raise self.error(f"malformed number {v!r}", tok) from None
        if tok.kind == STRING:
            self.next()
            return Str(tok.value)
        if tok.kind == IDENT:
            self.next()
            name = tok.value
            while self.at_op("::") and self.peek(1).kind == IDENT:
                self.next()
                name += "::" + self.next().value
            if self.at_op("("):
                return Call(name, tuple(self.parse_args()))
            return Name(name)
        if self.at_op("("):
            self.next()
            e = self.parse_expr()
            self.expect(")")
            return e
        raise self.error(f"expected expression, found {_describe(tok)}", tok)

    def parse_args(self) -> list[Expr]:
        self.expect("(")
        args: list[Expr] = []
        if not self.at_op(")"):
            args.append(self.parse_expr())
            while self.accept(","):
                args.append(self.parse_expr())
        self.expect(")")
        return args


def _describe(tok: Token) -> str:
    return "end of input" if tok.kind == EOF else repr(tok.value)


# --- parameter types ------------------------------------------------------------

_INT_WORDS = {"int", "int32_t", "int64_t", "size_t", "long", "unsigned", "bool", "short"}
_REAL_WORDS = {"double", "float"}


def classify_param_type(words: list[str]) -> ParamType | None:
    ws = set(words)
    if "qreg" in ws or "qubit" in ws:
        return ParamType.QREG
    if "vector" in ws:
        if ws & _REAL_WORDS:
            return ParamType.REAL_VECTOR
        if ws & _INT_WORDS:
            return ParamType.INT_VECTOR
        return None
    if ws & _REAL_WORDS:
        return ParamType.REAL
    if ws & _INT_WORDS:
        return ParamType.INT
    return None


# --- kernel parser ----------------------------------------------------------------

from .openqasm import QasmMixin  # noqa: E402
from .quil import QuilMixin  # noqa: E402
from .xasm import XasmMixin  # noqa: E402


class KernelParser(XasmMixin, QasmMixin, QuilMixin, TokenStream):
    """Parses a token stream of ``__qpu__`` kernel definitions."""

    def __init__(self, tokens, origins=None, filename=None):
        super().__init__(tokens, origins, filename)
        self._fresh = 0
        self.reset_kernel_state(None)

    def reset_kernel_state(self, signature: KernelSignature | None) -> None:
        self.signature = signature
        self.trace: list[tuple[SourceLanguage, int]] = []
        self.reset_qasm_state()

    def fresh_name(self, stem: str) -> str:
        self._fresh += 1
        return f"__{stem}{self._fresh}"

    def first_qreg(self, tok: Token | None = None) -> str:
        if self.signature is None or not self.signature.qreg_params:
            raise self.error("kernel has no qreg parameter", tok)
        return self.signature.qreg_params[0].name

    # top level
    def parse_file(self) -> list[KernelDef]:
        kernels: list[KernelDef] = []
        seen: set[str] = set()
        while self.peek().kind != EOF:
            if self.accept(";"):
                continue
            start = self.peek()
            kdef = self.parse_kernel()
            if kdef.name in seen:
                raise self.error(f"kernel {kdef.name!r} defined twice", start)
            seen.add(kdef.name)
            kernels.append(kdef)
        return kernels

    def parse_kernel(self) -> KernelDef:
        self.expect("__qpu__")
        self.expect("void")
        name_tok = self.expect_ident()
        params = self.parse_params()
        sig = KernelSignature(name_tok.value, tuple(params))
        self.reset_kernel_state(sig)
        self.expect("{")
        body = self.parse_statements(SourceLanguage.XASM)
        self.expect("}")
        fname, _ = self.where(name_tok)
        return KernelDef(sig, body, self.trace, fname)

    def parse_params(self) -> list[Param]:
        self.expect("(")
        params: list[Param] = []
        names: set[str] = set()
        while not self.at_op(")"):
            start = self.peek()
            words: list[str] = []
            depth = 0
            while True:
                tok = self.peek()
                if tok.kind == EOF:
                    raise self.error("unterminated parameter list", tok)
                if depth == 0 and tok.kind == OP and tok.value in (",", ")"):
                    break
                if tok.kind == OP and tok.value == "<":
                    depth += 1
                elif tok.kind == OP and tok.value == ">":
                    depth -= 1
                elif tok.kind == OP and tok.value == ">>":
                    depth -= 2
                if tok.kind == IDENT:
                    words.append(tok.value)
                self.next()
            if not words:
                raise self.error("empty parameter", start)
            ptype = classify_param_type(words)
            if ptype is not None and classify_param_type(words[:-1]) is ptype and len(words) > 1:
                pname = words[-1]
            elif ptype is not None:
                pname = f"__arg{len(params)}"
            else:
                raise self.error(f"unsupported parameter type {' '.join(words)!r}", start)
            if pname in names:
                raise self.error(f"duplicate parameter name {pname!r}", start)
            names.add(pname)
            params.append(Param(pname, ptype))
            if not self.accept(","):
                break
        self.expect(")")
        if not any(p.type is ParamType.QREG for p in params):
            raise self.error("a kernel needs at least one qreg parameter")
        return params

    # language dispatch
    def at_using(self) -> bool:
        return self.at("using") and self.peek(1).kind == IDENT

    def parse_using(self) -> SourceLanguage | None:
        tok = self.expect("using")
        ns = self.expect_ident()
        if ns.value == "namespace":
            while not self.at_op(";") and self.peek().kind != EOF:
                self.next()
            self.expect(";")
            return None
        if ns.value not in ("qk", "qcor"):
            raise self.error(f"unknown language namespace {ns.value!r}", ns, UnknownLanguage)
        self.expect("::")
        lang_tok = self.expect_ident()
        self.expect(";")
        lang = _LANG_NAMES.get(lang_tok.value.lower())
        if lang is None or lang is SourceLanguage.DECOMPOSE:
            raise self.error(f"unknown kernel language {lang_tok.value!r}", lang_tok, UnknownLanguage)
        self.trace.append((lang, self.line_of(tok)))
        return lang

    def parse_statements(self, lang: SourceLanguage, until_eof: bool = False) -> list[Stmt]:
        """Parse statements until the closing ``}`` (left unconsumed)."""
        if not self.trace:
            self.trace.append((lang, self.line_of(self.peek())))
        stmts: list[Stmt] = []
        while True:
            tok = self.peek()
            if tok.kind == EOF:
                if until_eof:
                    return stmts
                raise self.error("missing '}' before end of input", tok, UnbalancedBraces)
            if tok.kind == OP and tok.value == "}":
                if until_eof:
                    raise self.error("unmatched '}'", tok, UnbalancedBraces)
                return stmts
            if self.at_using():
                new = self.parse_using()
                if new is not None:
                    lang = new
                continue
            if lang is SourceLanguage.XASM:
                stmts.extend(self.xasm_statement())
            elif lang is SourceLanguage.OPENQASM:
                stmts.extend(self.qasm_statement())
            else:
                stmts.extend(self.quil_statement())


def check_braces(tokens: list[Token], stream: TokenStream) -> None:
    stack: list[Token] = []
    for tok in tokens:
        if tok.kind != OP:
            continue
        if tok.value == "{":
            stack.append(tok)
        elif tok.value == "}":
            if not stack:
                raise stream.error("unmatched '}'", tok, UnbalancedBraces)
            stack.pop()
    if stack:
        raise stream.error("unclosed '{'", stack[-1], UnbalancedBraces)


def _guarded(fn):
    """Convert unexpected internal failures into positioned syntax errors."""
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except FrontendError:
            raise
        except RecursionError:
            raise KernelSyntaxError("source nests too deeply", 0, 0, kwargs.get("filename")) from None
        except (ValueError, IndexError, OverflowError, TypeError) as exc:
            raise KernelSyntaxError(f"malformed source: {exc}", 0, 0, kwargs.get("filename")) from None
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@_guarded
def parse_kernels(source: str, filename: str | None = None,
                  base_dir: str | os.PathLike | None = None) -> list[KernelDef]:
    """Parse every ``__qpu__`` kernel in ``source``."""
    if isinstance(source, bytes):
        source = source.decode("utf-8", errors="replace")
    text, origins = preprocess(source, filename, base_dir)
    tokens = tokenize(text, filename)
    parser = KernelParser(tokens, origins, filename)
    check_braces(tokens, parser)
    return parser.parse_file()


@_guarded
def parse_qasm_file(source: str, name: str, filename: str | None = None,
                    base_dir: str | os.PathLike | None = None) -> KernelDef:
    """A standalone OpenQASM program as a kernel ``name(qreg q)``."""
    text, origins = preprocess(source, filename, base_dir)
    tokens = tokenize(text, filename)
    parser = KernelParser(tokens, origins, filename)
    check_braces(tokens, parser)
    sig = KernelSignature(name, (Param("q", ParamType.QREG),))
    parser.reset_kernel_state(sig)
    body = parser.parse_statements(SourceLanguage.OPENQASM, until_eof=True)
    return KernelDef(sig, body, parser.trace, filename)


def parse_path(path: str | os.PathLike) -> list[KernelDef]:
    """Parse a ``.qk`` kernel file or a standalone ``.qasm`` file."""
    p = Path(path)
    text = p.read_text(encoding="utf-8")
    if p.suffix.lower() == ".qasm":
        stem = re.sub(r"\W", "_", p.stem) or "qasm"
        return [parse_qasm_file(text, stem, filename=str(p), base_dir=p.parent)]
    return parse_kernels(text, filename=str(p), base_dir=p.parent)

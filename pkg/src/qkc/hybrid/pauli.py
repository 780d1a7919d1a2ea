"""Pauli and fermionic operator algebra, Jordan-Wigner mapping and text parsing."""

from __future__ import annotations

import numbers
import re
from functools import reduce
from typing import Iterable, Mapping

import numpy as np

from ..errors import OperatorParseError

COEFF_TOL = 1e-12

PauliTerm = tuple[tuple[int, str], ...]
FermionTerm = tuple[tuple[int, bool], ...]

# product of two single-qubit Paulis: (phase, result axis or "" for identity)
_PRODUCT = {
    ("X", "X"): (1, ""), ("Y", "Y"): (1, ""), ("Z", "Z"): (1, ""),
    ("X", "Y"): (1j, "Z"), ("Y", "Z"): (1j, "X"), ("Z", "X"): (1j, "Y"),
    ("Y", "X"): (-1j, "Z"), ("Z", "Y"): (-1j, "X"), ("X", "Z"): (-1j, "Y"),
}
_MATRICES = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _multiply_terms(a: PauliTerm, b: PauliTerm) -> tuple[complex, PauliTerm]:
    phase: complex = 1
    ops = dict(a)
    for q, axis in b:
        if q in ops:
            f, res = _PRODUCT[(ops[q], axis)]
            phase *= f
            if res:
                ops[q] = res
            else:
                del ops[q]
        else:
            ops[q] = axis
    return phase, tuple(sorted(ops.items()))


def _is_scalar(x) -> bool:
    return isinstance(x, numbers.Number) and not isinstance(x, bool)


class PauliOperator:
    """Complex-weighted sum of Pauli strings; the empty string is the identity."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[PauliTerm, complex] | None = None):
        self.terms: dict[PauliTerm, complex] = {}
        for term, c in (terms or {}).items():
            key = tuple(sorted(term))
            if len({q for q, _ in key}) != len(key):
                raise ValueError(f"repeated qubit in Pauli term {key}")
            for q, axis in key:
                if axis not in _MATRICES or q < 0:
                    raise ValueError(f"invalid Pauli factor {axis}{q}")
            self.terms[key] = self.terms.get(key, 0) + complex(c)
        self._simplify()

    # --- construction ----------------------------------------------------------
    @classmethod
    def single(cls, axis: str, qubit: int, coeff: complex = 1.0) -> "PauliOperator":
        if axis == "I":
            return cls.identity(coeff)
        return cls({((int(qubit), axis.upper()),): coeff})

    @classmethod
    def identity(cls, coeff: complex = 1.0) -> "PauliOperator":
        return cls({(): coeff})

    @classmethod
    def zero(cls) -> "PauliOperator":
        return cls()

    def _simplify(self) -> None:
        self.terms = {t: c for t, c in self.terms.items() if abs(c) > COEFF_TOL}

    # --- algebra -----------------------------------------------------------------
    def _coerce(self, other) -> "PauliOperator | None":
        if isinstance(other, PauliOperator):
            return other
        if _is_scalar(other):
            return PauliOperator.identity(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self.terms)
        for t, c in o.terms.items():
            out[t] = out.get(t, 0) + c
        return PauliOperator(out)

    __radd__ = __add__

    def __neg__(self):
        return PauliOperator({t: -c for t, c in self.terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else o + (-self)

    def __mul__(self, other):
        if _is_scalar(other):
            return PauliOperator({t: c * other for t, c in self.terms.items()})
        if not isinstance(other, PauliOperator):
            return NotImplemented
        out: dict[PauliTerm, complex] = {}
        for ta, ca in self.terms.items():
            for tb, cb in other.terms.items():
                phase, t = _multiply_terms(ta, tb)
                out[t] = out.get(t, 0) + phase * ca * cb
        return PauliOperator(out)

    def __rmul__(self, other):
        if _is_scalar(other):
            return self * other
        return NotImplemented

    def __truediv__(self, other):
        if _is_scalar(other):
            return self * (1 / other)
        return NotImplemented

    def __eq__(self, other) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.allclose(o, 0.0)

    def __hash__(self):
        return hash(frozenset(self.terms))

    def allclose(self, other: "PauliOperator", atol: float = 1e-10) -> bool:
        keys = set(self.terms) | set(other.terms)
        return all(abs(self.terms.get(k, 0) - other.terms.get(k, 0)) <= atol for k in keys)

    # --- inspection --------------------------------------------------------------
    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(sorted(self.terms.items(), key=lambda kv: _term_sort_key(kv[0])))

    @property
    def n_qubits(self) -> int:
        return max((q + 1 for t in self.terms for q, _ in t), default=0)

    @property
    def constant(self) -> complex:
        return self.terms.get((), 0)

    def is_hermitian(self, tol: float = 1e-9) -> bool:
        return all(abs(c.imag) <= tol for c in self.terms.values())

    def adjoint(self) -> "PauliOperator":
        return PauliOperator({t: np.conj(c) for t, c in self.terms.items()})

    def to_matrix(self, n_qubits: int | None = None) -> np.ndarray:
        """Dense matrix with qubit 0 as the least-significant bit of the basis index."""
        n = self.n_qubits if n_qubits is None else n_qubits
        if n < self.n_qubits:
            raise ValueError(f"operator acts on {self.n_qubits} qubits, asked for {n}")
        out = np.zeros((2 ** n, 2 ** n), dtype=complex)
        eye = np.eye(2, dtype=complex)
        for term, c in self.terms.items():
            ops = dict(term)
            # kron order: highest qubit first so qubit 0 is the last (least significant) factor
            factors = [_MATRICES[ops[q]] if q in ops else eye for q in range(n - 1, -1, -1)]
            out += c * reduce(np.kron, factors, np.eye(1, dtype=complex))
        return out

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for term, c in self:
            coeff = f"{c.real:.12g}" if abs(c.imag) <= COEFF_TOL else f"({c.real:.12g}{c.imag:+.12g}j)"
            label = " ".join(f"{a}{q}" for q, a in term)
            parts.append(f"{coeff} {label}".strip())
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"PauliOperator({self})"


def _term_sort_key(term: PauliTerm):
    return (len(term), [(q, a) for q, a in term])


def X(q: int) -> PauliOperator:
    return PauliOperator.single("X", q)


def Y(q: int) -> PauliOperator:
    return PauliOperator.single("Y", q)


def Z(q: int) -> PauliOperator:
    return PauliOperator.single("Z", q)


class FermionOperator:
    """Sum of products of ladder operators, kept in the order written."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[FermionTerm, complex] | None = None):
        self.terms: dict[FermionTerm, complex] = {}
        for term, c in (terms or {}).items():
            key = tuple((int(m), bool(d)) for m, d in term)
            self.terms[key] = self.terms.get(key, 0) + complex(c)
        self.terms = {t: c for t, c in self.terms.items() if abs(c) > COEFF_TOL}

    @classmethod
    def identity(cls, coeff: complex = 1.0) -> "FermionOperator":
        return cls({(): coeff})

    def _coerce(self, other):
        if isinstance(other, FermionOperator):
            return other
        if _is_scalar(other):
            return FermionOperator.identity(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self.terms)
        for t, c in o.terms.items():
            out[t] = out.get(t, 0) + c
        return FermionOperator(out)

    __radd__ = __add__

    def __neg__(self):
        return FermionOperator({t: -c for t, c in self.terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else o + (-self)

    def __mul__(self, other):
        if _is_scalar(other):
            return FermionOperator({t: c * other for t, c in self.terms.items()})
        if not isinstance(other, FermionOperator):
            return NotImplemented
        out: dict[FermionTerm, complex] = {}
        for ta, ca in self.terms.items():
            for tb, cb in other.terms.items():
                out[ta + tb] = out.get(ta + tb, 0) + ca * cb
        return FermionOperator(out)

    def __rmul__(self, other):
        return self * other if _is_scalar(other) else NotImplemented

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        keys = set(self.terms) | set(o.terms)
        return all(abs(self.terms.get(k, 0) - o.terms.get(k, 0)) <= COEFF_TOL for k in keys)

    def __hash__(self):
        return hash(frozenset(self.terms))

    def __repr__(self) -> str:
        parts = [f"{c:.6g} " + " ".join(f"{m}{'^' if d else ''}" for m, d in t) for t, c in self.terms.items()]
        return f"FermionOperator({' + '.join(parts) or '0'})"


def adag(mode: int) -> FermionOperator:
    return FermionOperator({((mode, True),): 1.0})


def a(mode: int) -> FermionOperator:
    return FermionOperator({((mode, False),): 1.0})


def _ladder(mode: int, dagger: bool) -> PauliOperator:
    z_string: PauliTerm = tuple((k, "Z") for k in range(mode))
    sign = -0.5j if dagger else 0.5j
    return PauliOperator({z_string + ((mode, "X"),): 0.5, z_string + ((mode, "Y"),): sign})


def jordan_wigner(op: FermionOperator) -> PauliOperator:
    """a_j -> Z_0..Z_{j-1} (X_j + iY_j)/2 and a+_j -> Z_0..Z_{j-1} (X_j - iY_j)/2."""
    total = PauliOperator()
    for term, c in op.terms.items():
        product = PauliOperator.identity(c)
        for mode, dagger in term:
            product = product * _ladder(mode, dagger)
        total = total + product
    return total


# --- text parsing ------------------------------------------------------------------
_NUMBER = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_TOKEN = re.compile(
    rf"(?P<ws>\s+)|(?P<dag>\d+\^)|(?P<complex>\(\s*[+-]?{_NUMBER}\s*,\s*[+-]?{_NUMBER}\s*\))|(?P<num>{_NUMBER})"
    r"|(?P<pauli>[XYZI]\d+)|(?P<op>[+\-*])"
)


def _tokens(text: str, kind: str) -> list[tuple[str, str, int]]:
    out, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise OperatorParseError(f"unexpected character {text[pos]!r}", pos)
        group = m.lastgroup
        if group != "ws":
            out.append((group, m.group(), pos))
        pos = m.end()
    if kind == "fermion":
        # bare integers are annihilation modes; coefficients need a decimal point
        out = [("ladder", v, p) if g == "dag" or (g == "num" and v.isdigit()) else (g, v, p)
               for g, v, p in out]
    return out


def _coefficient(group: str, value: str) -> complex:
    if group == "complex":
        re_part, im_part = value.strip("() ").split(",")
        return complex(float(re_part), float(im_part))
    return complex(float(value))


def parse_operator(kind: str, text: str) -> PauliOperator | FermionOperator:
    """Parse ``"2.2 X0 X1 + 3.3 Y0 Y1"`` (pauli) or ``"0.5 1^ 0 + 0.5 0^ 1"`` (fermion)."""
    kind = kind.lower()
    if kind not in ("pauli", "fermion"):
        raise OperatorParseError(f"unknown operator kind {kind!r}", 0)
    toks = _tokens(text, kind)
    zero = PauliOperator() if kind == "pauli" else FermionOperator()
    total = zero
    i, sign = 0, 1.0
    expect_term = True
    while i < len(toks):
        group, value, pos = toks[i]
        if group == "op" and value in "+-":
            if not expect_term or value == "-" or i == 0:
                sign = -sign if value == "-" else sign
                i += 1
                expect_term = True
                continue
        if not expect_term:
            raise OperatorParseError(f"expected '+' or '-' before {value!r}", pos)
        coeff: complex = 1.0
        saw = False
        if group in ("num", "complex"):
            coeff = _coefficient(group, value)
            saw = True
            i += 1
            if i < len(toks) and toks[i][1] == "*":
                i += 1
        factors = []
        while i < len(toks):
            group, value, pos = toks[i]
            if kind == "pauli" and group == "pauli":
                factors.append(value)
            elif kind == "fermion" and group == "ladder":
                factors.append(value)
            elif group == "op" and value == "*" and factors:
                pass
            else:
                break
            i += 1
        if not saw and not factors:
            raise OperatorParseError(f"expected a term, got {value!r}", pos)
        total = total + sign * coeff * _term(kind, factors)
        sign = 1.0
        expect_term = False
    if expect_term and toks:
        raise OperatorParseError("operator ends with a dangling sign", len(text))
    return total


def _term(kind: str, factors: Iterable[str]):
    if kind == "pauli":
        op = PauliOperator.identity()
        for f in factors:
            op = op * PauliOperator.single(f[0], int(f[1:]))
        return op
    op = FermionOperator.identity()
    for f in factors:
        op = op * (adag(int(f[:-1])) if f.endswith("^") else a(int(f)))
    return op

"""Turning an operator into measured circuits and estimating its expectation value."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from ..backend.simulator import Backend, StatevectorBackend
from ..errors import AlreadyMeasured, NonHermitianOperator
from ..ir.circuit import DEFAULT_REGISTER, Circuit, Instruction, QubitRef, flatten
from ..ir.gates import PAULI, GateKind, gate_matrix
from ..ir.unitary import apply_matrix
from .pauli import PauliOperator, PauliTerm

IMAG_TOL = 1e-9


@dataclass
class MeasuredTerm:
    coefficient: complex
    term: PauliTerm
    circuit: Circuit


@dataclass
class Observation:
    offset: complex
    terms: list[MeasuredTerm]


def _basis_change(term: PauliTerm) -> list[Instruction]:
    out = []
    for q, axis in term:
        ref = (QubitRef(DEFAULT_REGISTER, q),)
        if axis == "X":
            out.append(Instruction(GateKind.H, ref))
        elif axis == "Y":
            out += [Instruction(GateKind.Sdg, ref), Instruction(GateKind.H, ref)]
    return out


def _unmeasured(circuit: Circuit | Iterable[Instruction]) -> list[Instruction]:
    insts = flatten(circuit) if isinstance(circuit, Circuit) else list(circuit)
    bad = next((i for i in insts if not i.kind.is_unitary), None)
    if bad is not None:
        raise AlreadyMeasured(f"observe needs an unmeasured circuit; found {bad.kind.value}")
    return insts


def observe(op: PauliOperator, circuit: Circuit | Iterable[Instruction]) -> Observation:
    """One measured copy of ``circuit`` per non-identity term, plus the identity coefficient."""
    insts = _unmeasured(circuit)
    terms = []
    for term, coeff in op:
        if not term:
            continue
        measures = [Instruction(GateKind.Measure, (QubitRef(DEFAULT_REGISTER, q),)) for q, _ in term]
        name = "_".join(f"{axis}{q}" for q, axis in term)
        terms.append(MeasuredTerm(coeff, term, Circuit(name, insts + _basis_change(term) + measures)))
    return Observation(op.constant, terms)


def _check_hermitian(op: PauliOperator) -> None:
    worst = max((abs(c.imag) for _, c in op), default=0.0)
    if worst > IMAG_TOL:
        raise NonHermitianOperator(f"operator has a coefficient with imaginary part {worst:.3g}")


def exact_expectation(op: PauliOperator, circuit: Circuit | Iterable[Instruction]) -> float:
    """<psi|op|psi> from the noiseless statevector of ``circuit``."""
    _check_hermitian(op)
    insts = _unmeasured(circuit)
    n = max([op.n_qubits] + [q + 1 for i in insts for q in i.indices] + [1])
    state = np.zeros((1,) + (2,) * n, dtype=complex)
    state[(0,) * (n + 1)] = 1.0
    for inst in insts:
        state = apply_matrix(state, gate_matrix(inst.kind, inst.params), inst.indices, n)
    total = 0.0
    bra = state.reshape(-1).conj()
    for term, coeff in op:
        image = state
        for q, axis in term:
            image = apply_matrix(image, PAULI[axis], (q,), n)
        total += coeff.real * float(np.real(bra @ image.reshape(-1)))
    return total


def circuit_expectation(op: PauliOperator, circuit: Circuit | Iterable[Instruction],
                        backend: Backend | None = None, shots: int | None = None) -> float:
    """Expectation of ``op`` after ``circuit``; ``shots=None`` uses the exact statevector."""
    _check_hermitian(op)
    if shots is None:
        return exact_expectation(op, circuit)
    backend = backend or StatevectorBackend()
    obs = observe(op, circuit)
    value = obs.offset.real
    for mt in obs.terms:
        value += mt.coefficient.real * backend.run(mt.circuit, shots).expectation()
    return float(value)

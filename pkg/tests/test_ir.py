import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qkc.errors import (
    AdjointOfNonUnitary, ControlOfNonUnitary, InvalidInstruction, NonUnitaryInstruction, TooManyQubits,
)
from qkc.ir import (
    Circuit, GateKind, QubitRef, adjoint, controlled, equal_up_to_phase, flatten, gate,
    print_circuit, stats, to_unitary,
)

from helpers import random_circuit

SEEDS = st.integers(0, 2**32 - 1)


def bell() -> Circuit:
    return Circuit("bell", [gate("H", 0), gate("CX", 0, 1), gate("Measure", 0), gate("Measure", 1)])


def test_instruction_arity_and_params_are_checked():
    with pytest.raises(InvalidInstruction):
        gate("CX", 0)
    with pytest.raises(InvalidInstruction):
        gate("Rz", 0)
    with pytest.raises(InvalidInstruction):
        gate("CX", 1, 1)
    with pytest.raises(InvalidInstruction):
        gate("unknown", 0)


def test_measure_slot_defaults_to_qubit():
    assert gate("Measure", 3).slot == 3
    assert gate("Measure", 3, target=0).slot == 0
    with pytest.raises(InvalidInstruction):
        gate("H", 0, target=1)


def test_flatten_depth_first():
    c = Circuit("outer", [gate("H", 0), Circuit("inner", [gate("CX", 0, 1)])])
    assert flatten(c) == [gate("H", 0), gate("CX", 0, 1)]
    assert flatten(Circuit()) == []


def test_circuit_cannot_contain_itself():
    c = Circuit("a")
    with pytest.raises(InvalidInstruction):
        c.append(c)
    outer = Circuit("outer", [c])
    with pytest.raises(InvalidInstruction):
        c.append(outer)


def test_adjoint_reverses_and_inverts():
    c = Circuit("c", [gate("Rz", 0, params=[0.3]), gate("CX", 0, 1)])
    assert flatten(adjoint(c)) == [gate("CX", 0, 1), gate("Rz", 0, params=[-0.3])]
    assert flatten(adjoint(Circuit("h", [gate("H", 0)]))) == [gate("H", 0)]
    assert flatten(adjoint(Circuit("t", [gate("T", 0), gate("S", 1)]))) == [gate("Sdg", 1), gate("Tdg", 0)]


def test_adjoint_rejects_measurement():
    with pytest.raises(AdjointOfNonUnitary):
        adjoint(bell())


def test_controlled_t_is_cphase_quarter_pi():
    c = controlled(Circuit("t", [gate("T", 1)]), QubitRef("q", 0))
    expected = np.diag([1, 1, 1, np.exp(1j * np.pi / 4)])
    assert np.allclose(to_unitary(c, 2), expected, atol=1e-9)


def test_controlled_empty_and_non_unitary():
    assert flatten(controlled(Circuit(), QubitRef("q", 0))) == []
    with pytest.raises(ControlOfNonUnitary):
        controlled(bell(), QubitRef("q", 2))


def test_to_unitary_small_cases():
    assert np.allclose(to_unitary([gate("X", 0)], 1), [[0, 1], [1, 0]])
    assert np.allclose(to_unitary([gate("H", 0)], 1), np.array([[1, 1], [1, -1]]) / np.sqrt(2))
    # little-endian: CX with control 0 maps |01> (index 1) to |11> (index 3)
    u = to_unitary([gate("CX", 0, 1)], 2)
    assert u[3, 1] == 1 and u[1, 3] == 1


def test_to_unitary_errors():
    with pytest.raises(TooManyQubits):
        to_unitary([gate("H", 0)], 11)
    with pytest.raises(NonUnitaryInstruction):
        to_unitary([gate("Measure", 0)], 1)


def test_stats():
    s = stats(bell())
    assert (s.total_gates, s.two_qubit_count, s.depth) == (4, 1, 3)
    assert s.histogram == {"H": 1, "CX": 1, "Measure": 2}
    assert stats(Circuit()).to_dict() == {"total_gates": 0, "histogram": {}, "two_qubit_count": 0, "depth": 0}
    assert stats([gate("H", 0), gate("H", 1)]).depth == 1


def test_print_format():
    sink = io.StringIO()
    print_circuit(Circuit("c", [gate("H", 0), gate("CX", 0, 1), gate("Rz", 2, params=[0.5]),
                                gate("Measure", 0)]), sink)
    assert sink.getvalue() == "H q0\nCNOT q0,q1\nRz(0.5) q2\nMeasure q0\n"


@settings(max_examples=40, deadline=None)
@given(seed=SEEDS, n=st.integers(1, 6))
def test_adjoint_round_trip(seed, n):
    c = random_circuit(np.random.default_rng(seed), n, 20)
    u = to_unitary(c, n)
    assert np.allclose(to_unitary(adjoint(c), n) @ u, np.eye(1 << n), atol=1e-9)


@settings(max_examples=30, deadline=None)
@given(seed=SEEDS, n=st.integers(1, 4))
def test_controlled_block_embedding(seed, n):
    c = random_circuit(np.random.default_rng(seed), n, 12)
    ctrl = QubitRef("q", n)
    u = to_unitary(c, n)
    cu = to_unitary(controlled(c, ctrl), n + 1)
    dim = 1 << n
    # the control is the most significant qubit: first block has it at |0>
    assert np.allclose(cu[:dim, :dim], np.eye(dim), atol=1e-9)
    assert np.allclose(cu[dim:, dim:], u, atol=1e-9)
    assert np.allclose(cu[:dim, dim:], 0, atol=1e-9)


@settings(max_examples=30, deadline=None)
@given(seed=SEEDS)
def test_flatten_idempotent_and_stats_total(seed):
    rng = np.random.default_rng(seed)
    inner = random_circuit(rng, 3, 5)
    c = Circuit("outer", [random_circuit(rng, 3, 4), Circuit("mid", [inner]), gate("H", 0)])
    flat = flatten(c)
    assert flatten(Circuit("again", flat)) == flat
    assert stats(c).total_gates == len(flat)
    assert sum(stats(c).histogram.values()) == len(flat)


def test_gate_matrices_are_unitary():
    for kind in GateKind:
        if not kind.is_unitary:
            continue
        params = [0.37, -1.1, 2.0][: kind.n_params]
        g = gate(kind, *range(kind.arity), params=params)
        u = to_unitary([g], kind.arity)
        assert np.allclose(u @ u.conj().T, np.eye(len(u)), atol=1e-12), kind


def test_equal_up_to_phase():
    u = to_unitary([gate("H", 0)], 1)
    assert equal_up_to_phase(u, np.exp(0.7j) * u)
    assert not equal_up_to_phase(u, to_unitary([gate("X", 0)], 1))

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qkc.errors import UnknownPass
from qkc.frontend import KernelRegistry
from qkc.ir import Circuit, GateKind, equal_up_to_phase, flatten, gate, stats, to_unitary
from qkc.passes import OPT_LEVELS, pass_names, register_pass, run_level, run_pass, run_passes

from helpers import KERNELS, random_circuit

BUILTIN = ["circuit-optimizer", "rotation-folding", "single-qubit-gate-merging"]


def _kinds(c):
    return [(i.kind, i.indices) for i in flatten(c)]


def test_level_table():
    assert list(OPT_LEVELS[0]) == []
    assert list(OPT_LEVELS[1]) == ["rotation-folding", "single-qubit-gate-merging", "circuit-optimizer"]
    assert set(BUILTIN) <= set(pass_names())


def test_level_zero_is_identity():
    c = Circuit("c", [gate("H", 0), gate("H", 0), gate("CX", 0, 1)])
    out, report = run_level(0, c)
    assert flatten(out) == flatten(c) and report == []


def test_level_one_t_tdg_pairs():
    c = Circuit("c", [gate("T", 0), gate("T", 0), gate("Tdg", 0), gate("Tdg", 0)])
    out, _ = run_level(1, c)
    assert flatten(out) == []


def test_circuit_optimizer_examples():
    out, _ = run_pass("circuit-optimizer", [gate("H", 0), gate("H", 0)])
    assert flatten(out) == []
    out, _ = run_pass("circuit-optimizer", [gate("CX", 0, 1), gate("X", 2), gate("CX", 0, 1)])
    assert _kinds(out) == [(GateKind.X, (2,))]
    out, _ = run_pass("circuit-optimizer", [gate("Rz", 0, params=[2 * math.pi])])
    assert flatten(out) == []
    out, _ = run_pass("circuit-optimizer", [gate("S", 0), gate("Sdg", 0), gate("Tdg", 1), gate("T", 1)])
    assert flatten(out) == []


def test_circuit_optimizer_blocked_by_shared_qubit():
    c = [gate("CX", 0, 1), gate("X", 1), gate("CX", 0, 1)]
    out, _ = run_pass("circuit-optimizer", c)
    assert len(flatten(out)) == 3


def test_rotation_folding_examples():
    out, _ = run_pass("rotation-folding", [gate("Rz", 0, params=[0.3]), gate("Rz", 0, params=[0.5])])
    (only,) = flatten(out)
    assert only.kind is GateKind.Rz and only.params[0] == pytest.approx(0.8)

    a, b = 0.37, 1.21
    c = [gate("Rz", 0, params=[a]), gate("CX", 0, 1), gate("Rz", 0, params=[b])]
    out, _ = run_pass("rotation-folding", c)
    assert [i.kind for i in flatten(out)] == [GateKind.CX, GateKind.Rz]
    assert equal_up_to_phase(to_unitary(out, 2), to_unitary(c, 2))

    blocked = [gate("Rz", 1, params=[a]), gate("CX", 0, 1), gate("Rz", 1, params=[b])]
    out, _ = run_pass("rotation-folding", blocked)
    assert flatten(out) == blocked
    # the oracle confirms these do not commute
    assert not equal_up_to_phase(to_unitary(out, 2),
                                 to_unitary([gate("CX", 0, 1), gate("Rz", 1, params=[a + b])], 2))


def test_rotation_folding_zero_sum_deleted():
    out, _ = run_pass("rotation-folding", [gate("Rx", 0, params=[0.4]), gate("Rx", 0, params=[-0.4])])
    assert flatten(out) == []


def test_single_qubit_merging_examples():
    c = [gate("H", 0), gate("S", 0), gate("H", 0)]
    out, _ = run_pass("single-qubit-gate-merging", c)
    assert len(flatten(out)) == 1
    assert equal_up_to_phase(to_unitary(out, 1), to_unitary(c, 1), atol=1e-9)
    out, _ = run_pass("single-qubit-gate-merging", [gate("X", 0), gate("X", 0)])
    assert flatten(out) == []
    out, _ = run_pass("single-qubit-gate-merging", [gate("T", 0)])
    assert len(flatten(out)) == 1


def test_trailing_measures_preserved():
    c = [gate("H", 0), gate("H", 0), gate("Measure", 0), gate("Measure", 1, target=3)]
    out, _ = run_level(1, c)
    ms = flatten(out)
    assert [(i.kind, i.indices[0], i.slot) for i in ms] == [
        (GateKind.Measure, 0, 0), (GateKind.Measure, 1, 3)]


def test_pass_stats_fields():
    c = Circuit("c", [gate("H", 0), gate("H", 0), gate("X", 1)])
    _, st = run_pass("circuit-optimizer", c)
    assert st.pass_name == "circuit-optimizer" and st.wall_time >= 0
    assert st.gates_before.total_gates == 3 and st.gates_after.total_gates == 1
    assert st.reduction_fraction == pytest.approx(1 - 1 / 3)
    d = st.to_dict()
    assert d["name"] == "circuit-optimizer" and d["before"]["histogram"] == {"H": 2, "X": 1}
    _, empty = run_pass("circuit-optimizer", [])
    assert empty.reduction_fraction == 0.0


def test_unknown_pass_and_registration():
    with pytest.raises(UnknownPass):
        run_pass("nope", [])
    with pytest.raises(UnknownPass):
        run_level(7, [])
    register_pass("drop-nothing", lambda insts: list(insts))
    out, _ = run_passes(["drop-nothing"], [gate("H", 0)])
    assert len(flatten(out)) == 1


@pytest.mark.parametrize("name", BUILTIN)
@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), n=st.integers(1, 4), length=st.integers(0, 30))
def test_pass_soundness_and_no_growth(name, seed, n, length):
    c = random_circuit(np.random.default_rng(seed), n, length)
    out, _ = run_pass(name, c)
    assert stats(out).total_gates <= stats(c).total_gates
    assert equal_up_to_phase(to_unitary(out, n), to_unitary(c, n), atol=1e-9)


@pytest.mark.parametrize("name", BUILTIN)
@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), n=st.integers(1, 4), length=st.integers(0, 30))
def test_pass_idempotent(name, seed, n, length):
    c = random_circuit(np.random.default_rng(seed), n, length)
    once, _ = run_pass(name, c)
    twice, _ = run_pass(name, once)
    assert flatten(twice) == flatten(once)


def test_cancellation_heavy_circuits():
    # small gate alphabet so that cancellations actually occur
    rng = np.random.default_rng(5)
    kinds_1q = [GateKind.H, GateKind.X, GateKind.T, GateKind.Tdg, GateKind.S, GateKind.Rz]
    total_before = total_after = 0
    for _ in range(50):
        c = random_circuit(rng, 3, 40, kinds_1q=kinds_1q, kinds_2q=[GateKind.CX, GateKind.CZ])
        out, _ = run_level(1, c)
        total_before += stats(c).total_gates
        total_after += stats(out).total_gates
        assert equal_up_to_phase(to_unitary(out, 3), to_unitary(c, 3), atol=1e-9)
    assert total_after < total_before


@pytest.mark.parametrize("path", sorted((KERNELS / "corpus").iterdir()), ids=lambda p: p.name)
def test_corpus_strictly_reduced(path):
    r = KernelRegistry()
    (name,) = r.load_file(path)
    params = r.get(name).signature.params
    args = [3 if p.type.value == "qreg" else 0.25 for p in params]
    c = r.instantiate(name, args)
    out, report = run_level(1, c)
    assert stats(out).total_gates < stats(c).total_gates
    assert report[0].gates_before.total_gates == stats(c).total_gates

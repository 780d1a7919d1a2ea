import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import chi2_contingency

from qkc.backend import (
    FtqcRuntime, NisqRuntime, NoiseModel, QRegBuffer, StatevectorBackend, backend_names,
    load_noise_model, make_backend, parse_selector, qalloc,
)
from qkc.backend.buffer import parity_expectation
from qkc.backend.simulator import measured_slots
from qkc.errors import (
    BackendError, CapacityError, EmptyCounts, NoActiveSession, NoiseModelError, QubitOutOfRange,
    ResourceError, UnknownBackend, ZeroShots,
)
from qkc.ir import Circuit, flatten, gate, to_unitary

from helpers import random_circuit, tv_distance


def _bell():
    return Circuit("bell", [gate("H", 0), gate("CX", 0, 1), gate("Measure", 0), gate("Measure", 1)])


# buffers and expectations


@pytest.mark.parametrize("counts, expected", [
    ({"0": 100}, 1.0), ({"1": 100}, -1.0), ({"00": 50, "11": 50}, 1.0), ({"01": 30, "00": 10}, -0.5),
])
def test_exp_val_z_examples(counts, expected):
    buf = qalloc(2)
    buf.set_result(counts)
    assert buf.exp_val_z() == pytest.approx(expected)


def test_qalloc():
    buf = qalloc(2)
    assert buf.size == 2 and buf.counts == {}
    with pytest.raises(EmptyCounts):
        buf.exp_val_z()
    with pytest.raises(BackendError):
        qalloc(0)


def test_buffer_json():
    buf = QRegBuffer(2)
    buf.set_result({"11": 3, "00": 5})
    assert buf.to_json() == {"counts": {"00": 5, "11": 3}, "shots": 8}


# simulator


def test_bell_counts_within_binomial_bounds():
    res = StatevectorBackend(seed=1).run(_bell(), 1024)
    assert set(res.counts) <= {"00", "11"}
    assert all(400 <= v <= 624 for v in res.counts.values())
    assert sum(res.counts.values()) == 1024


def test_x_then_measure_always_one():
    res = StatevectorBackend(seed=0).run([gate("X", 0), gate("Measure", 0)], 77)
    assert res.counts == {"1": 77} and res.expectation() == -1.0


def test_no_measurement_gives_empty_key():
    assert StatevectorBackend(seed=0).run([gate("H", 0)], 10).counts == {"": 10}


def test_key_order_follows_slots():
    c = [gate("X", 0), gate("Measure", 0, target=2), gate("Measure", 1, target=0)]
    assert measured_slots(c) == [0, 2]
    assert StatevectorBackend(seed=0).run(c, 5).counts == {"01": 5}


def test_execute_errors():
    b = StatevectorBackend(seed=0)
    with pytest.raises(ZeroShots):
        b.run(_bell(), 0)
    with pytest.raises(QubitOutOfRange):
        b.execute(_bell(), qalloc(1), 10)
    with pytest.raises(CapacityError) as info:
        b.run([gate("H", i) for i in range(25)], 1)
    assert isinstance(info.value, ResourceError)


def test_execute_fills_buffer():
    buf = qalloc(2)
    StatevectorBackend(seed=4).execute(_bell(), buf, 100)
    assert buf.shots == 100 and set(buf.counts) <= {"00", "11"}


def test_depolarized_x_chain_below_one():
    noise = NoiseModel(p1=0.001)
    c = [gate("X", 0) for _ in range(100)] + [gate("Measure", 0)]
    exp = StatevectorBackend(noise, seed=3).run(c, 4096).expectation()
    assert exp < 1.0
    assert exp == pytest.approx(1 - 2 * (1 - (1 - 4 / 3 * 0.001) ** 100) / 2, abs=0.05)


def test_readout_error_rate():
    noise = NoiseModel({0: (0.1, 0.0)})
    counts = StatevectorBackend(noise, seed=5).run([gate("Measure", 0)], 20_000).counts
    assert counts["1"] / 20_000 == pytest.approx(0.1, abs=0.01)


def test_seed_determinism():
    c = random_circuit(np.random.default_rng(1), 4, 30)
    c.extend([gate("Measure", i) for i in range(4)])
    a = StatevectorBackend(seed=42).run(c, 2000).counts
    b = StatevectorBackend(seed=42).run(c, 2000).counts
    assert a == b
    noisy = NoiseModel({1: (0.05, 0.05)}, p1=0.01, p2=0.02)
    assert StatevectorBackend(noisy, seed=7).run(c, 500).counts == StatevectorBackend(noisy, seed=7).run(c, 500).counts


def _canonical_circuits():
    ghz = Circuit("ghz", [gate("H", 0), gate("CX", 0, 1), gate("CX", 1, 2)])
    rot = Circuit("rot", [gate("Ry", 0, params=[0.7]), gate("Rx", 1, params=[2.1]), gate("CZ", 0, 1),
                          gate("H", 2), gate("CRz", 2, 0, params=[1.3]), gate("Ry", 2, params=[0.4])])
    rnd = random_circuit(np.random.default_rng(12), 3, 25)
    for c in (ghz, rot, rnd):
        c.extend([gate("Measure", i) for i in range(3)])
    return [ghz, rot, rnd]


@pytest.mark.parametrize("idx", range(3))
def test_trajectory_matches_final_state_sampling(idx):
    c = flatten(_canonical_circuits()[idx])
    b = StatevectorBackend(seed=idx)
    final = b.run(c, 10_000).counts
    n, index = b._compact(c)
    slot_pos = {s: k for k, s in enumerate(measured_slots(c))}
    bits = b._trajectories(c, n, index, slot_pos, 10_000, b.next_rng())
    traj = {}
    for row in bits:
        key = "".join("1" if x else "0" for x in row)
        traj[key] = traj.get(key, 0) + 1
    keys = sorted(set(final) | set(traj))
    table = np.array([[final.get(k, 0) for k in keys], [traj.get(k, 0) for k in keys]])
    if len(keys) > 1:
        assert chi2_contingency(table)[1] > 0.001


def test_exact_probabilities():
    probs = StatevectorBackend().probabilities(_bell())
    assert probs == pytest.approx({"00": 0.5, "11": 0.5})


# streaming sessions


def test_session_measure_after_x():
    b = StatevectorBackend(seed=0)
    for _ in range(20):
        s = b.open_session(1)
        s.apply(gate("X", 0))
        assert s.measure(gate("Measure", 0)) == 1


def test_session_h_mean():
    b = StatevectorBackend(seed=8)
    total = 0
    for _ in range(10_000):
        s = b.open_session(1)
        s.apply(gate("H", 0))
        total += s.measure(gate("Measure", 0))
    assert 0.47 <= total / 10_000 <= 0.53


def test_session_projection_and_closing():
    s = StatevectorBackend(seed=2).open_session(2)
    s.apply(gate("H", 0))
    s.apply(gate("CX", 0, 1))
    bit = s.measure(gate("Measure", 0))
    assert np.linalg.norm(s.statevector) == pytest.approx(1.0, abs=1e-12)
    assert s.measure(gate("Measure", 1)) == bit
    assert s.key() == f"{bit}{bit}"
    with pytest.raises(QubitOutOfRange):
        s.apply(gate("X", 2))
    s.close()
    with pytest.raises(NoActiveSession):
        s.apply(gate("X", 0))
    with pytest.raises(NoActiveSession):
        s.measure(gate("Measure", 0))


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), n=st.integers(1, 4), length=st.integers(1, 25))
def test_session_norm_and_unitary_agreement(seed, n, length):
    c = random_circuit(np.random.default_rng(seed), n, length)
    s = StatevectorBackend(seed=0).open_session(n)
    for inst in flatten(c):
        s.apply(inst)
        assert np.linalg.norm(s.statevector) == pytest.approx(1.0, abs=1e-12)
    expected = to_unitary(c, n)[:, 0]
    assert np.allclose(s.statevector, expected, atol=1e-9)


def test_nisq_and_ftqc_agree_on_bell():
    backend = StatevectorBackend(seed=21)
    nisq = NisqRuntime(backend)
    nisq.extend(flatten(_bell()))
    batched = nisq.submit(None, 1024).counts
    assert nisq.queue == []

    def program(session):
        for inst in flatten(_bell()):
            if inst.kind.name == "Measure":
                session.measure(inst)
            else:
                session.apply(inst)
    streamed = FtqcRuntime(backend).run(program, 2, 1024).counts
    assert tv_distance(batched, streamed) < 0.06


def test_ftqc_rejects_zero_shots():
    with pytest.raises(ZeroShots):
        FtqcRuntime(StatevectorBackend()).run(lambda s: None, 1, 0)


# selectors and noise files


def test_selector_forms(tmp_path):
    assert parse_selector("sim") == ("sim", {})
    assert parse_selector("sim:seed=3") == ("sim", {"seed": "3"})
    path = tmp_path / "noise.json"
    path.write_text(json.dumps({"readout_errors": [{"qubit": 0, "p01": 0.2, "p10": 0.1}],
                                "depolarizing": {"one_qubit": 0.001, "two_qubit": 0.01}}))
    name, opts = parse_selector(f"sim[noise-model:{path},seed:3]")
    assert name == "sim" and opts == {"noise-model": str(path), "seed": "3"}
    b = make_backend(f"sim[noise-model:{path},seed:3]")
    assert b.noise.readout(0) == (0.2, 0.1) and b.noise.p2 == 0.01 and b.seed == 3
    assert "sim" in backend_names()
    with pytest.raises(UnknownBackend):
        make_backend("aer")


def test_noise_model_json_roundtrip_and_errors(tmp_path):
    model = NoiseModel({0: (0.01, 0.02), 3: (0.0, 0.5)}, p1=0.001, p2=0.01)
    path = tmp_path / "m.json"
    path.write_text(json.dumps(model.to_dict()))
    assert load_noise_model(path) == model
    for bad in ({"readout_errors": [{"qubit": 0, "p01": 1.5}]}, {"depolarizing": {"one_qubit": -0.1}},
                {"readout_errors": [{"p01": 0.1}]}, [1, 2]):
        path.write_text(json.dumps(bad))
        with pytest.raises(NoiseModelError):
            load_noise_model(path)
    with pytest.raises(NoiseModelError):
        load_noise_model(tmp_path / "missing.json")


def test_parity_expectation_empty():
    with pytest.raises(EmptyCounts):
        parity_expectation({})

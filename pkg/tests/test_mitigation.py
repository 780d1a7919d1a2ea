import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qkc.backend import NoiseModel, StatevectorBackend
from qkc.backend.simulator import Backend
from qkc.errors import (
    FoldingNonUnitary, SingularConfusionMatrix, TooManyQubitsForCalibration, UnknownMitigation,
)
from qkc.ir import Circuit, equal_up_to_phase, flatten, gate, stats, to_unitary
from qkc.mitigation import (
    ReadoutMitigation, ZeroNoiseExtrapolation, build_chain, mitigation_names,
)
from qkc.mitigation.readout import correct_distribution, counts_to_vector
from qkc.mitigation.zne import fold_global, linear_extrapolate, split_measurements

from helpers import random_circuit


def _bell():
    return [gate("H", 0), gate("CX", 0, 1), gate("Measure", 0), gate("Measure", 1)]


def _x_chain(n=100):
    return [gate("X", 0) for _ in range(n)] + [gate("Measure", 0)]


class Spy(Backend):
    """Records a label per execution and forwards to a simulator."""
    name = "spy"

    def __init__(self, inner):
        self.inner = inner
        self.trace = []

    def run(self, circuit, shots):
        self.trace.append(circuit.name if isinstance(circuit, Circuit) else len(circuit))
        return self.inner.run(circuit, shots)


def test_registered_names():
    assert mitigation_names() == ["ro-error", "zne"]
    with pytest.raises(UnknownMitigation):
        build_chain(StatevectorBackend(), ["mitiq"])


# readout


def test_readout_identity_confusion():
    shots = 4000
    raw = StatevectorBackend(seed=1).run(_bell(), shots)
    mitigated = ReadoutMitigation(StatevectorBackend(seed=1)).run(_bell(), shots)
    for key in ("00", "11"):
        assert mitigated.counts.get(key, 0) / shots == pytest.approx(
            raw.counts.get(key, 0) / shots, abs=2 / np.sqrt(shots))


def test_readout_recovers_zero_state():
    noise = NoiseModel({0: (0.1, 0.1)})
    res = ReadoutMitigation(StatevectorBackend(noise, seed=3)).run([gate("Measure", 0)], 10_000)
    assert res.counts.get("0", 0) / 10_000 >= 0.98


def test_readout_improves_bell_parity():
    noise = NoiseModel({0: (0.05, 0.05), 1: (0.05, 0.05)})
    wins = 0
    for seed in range(20):
        raw = StatevectorBackend(noise, seed=seed).run(_bell(), 2000).expectation()
        fixed = ReadoutMitigation(StatevectorBackend(noise, seed=seed)).run(_bell(), 2000).expectation()
        wins += abs(fixed - 1.0) < abs(raw - 1.0)
    assert wins >= 18


def test_readout_calibration_is_cached():
    ro = ReadoutMitigation(StatevectorBackend(seed=0))
    ro.run(_bell(), 100)
    ro.run(_bell(), 100)
    assert ro.calibration_runs == 1
    ro.invalidate()
    ro.run(_bell(), 100)
    assert ro.calibration_runs == 2


def test_analytic_inversion():
    # prepared |0> read through p01 = 0.2: raw (0.8, 0.2) inverts exactly to (1, 0)
    out = correct_distribution(np.array([0.8, 0.2]), [(0.2, 0.3)])
    assert np.allclose(out, [1.0, 0.0], atol=1e-12)
    two = correct_distribution(np.kron([0.7, 0.3], [0.8, 0.2]), [(0.2, 0.1), (0.1, 0.3)])
    assert np.allclose(two.sum(), 1.0)


@settings(max_examples=100, deadline=None)
@given(probs=st.lists(st.floats(0, 1), min_size=4, max_size=4).filter(lambda p: sum(p) > 1e-3),
       errs=st.lists(st.tuples(st.floats(0, 0.45), st.floats(0, 0.45)), min_size=2, max_size=2))
def test_corrected_distribution_is_valid(probs, errs):
    p = np.array(probs) / sum(probs)
    out = correct_distribution(p, errs)
    assert np.all(out >= 0) and out.sum() == pytest.approx(1.0, abs=1e-9)


def test_counts_vector_bit_order():
    assert np.allclose(counts_to_vector({"10": 1, "01": 3}, 2), [0, 0.25, 0.75, 0])


def test_readout_errors():
    with pytest.raises(SingularConfusionMatrix):
        correct_distribution(np.array([0.5, 0.5]), [(0.6, 0.4)])
    c = [gate("Measure", i) for i in range(13)]
    with pytest.raises(TooManyQubitsForCalibration):
        ReadoutMitigation(StatevectorBackend(seed=0)).run(c, 10)


# zne


def test_ols_synthetic_decay():
    scales = [1, 3, 5]
    assert linear_extrapolate(scales, [1 - 0.02 * s for s in scales]) == pytest.approx(1.0, abs=1e-6)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), n=st.integers(1, 4), length=st.integers(1, 15),
       scale=st.sampled_from([1, 3, 5, 7]))
def test_folding_count_and_unitary(seed, n, length, scale):
    c = flatten(random_circuit(np.random.default_rng(seed), n, length))
    folded = fold_global(c, scale)
    assert stats(folded).total_gates == scale * stats(c).total_gates
    assert equal_up_to_phase(to_unitary(folded, n), to_unitary(c, n), atol=1e-9)


def test_folding_errors():
    with pytest.raises(FoldingNonUnitary):
        split_measurements([gate("H", 0), gate("Measure", 0), gate("H", 0), gate("Measure", 0)])
    with pytest.raises(ValueError):
        fold_global([gate("H", 0)], 2)


def test_zne_noiseless_matches_raw():
    shots = 2000
    zne = ZeroNoiseExtrapolation(StatevectorBackend(seed=2))
    c = [gate("Ry", 0, params=[1.0]), gate("Measure", 0)]
    est = zne.run(c, shots).expectation()
    assert est == pytest.approx(np.cos(1.0), abs=3 * 2 / np.sqrt(shots))
    assert len(zne.last_values) == 3


def test_zne_beats_raw_on_x_chain():
    noise = NoiseModel(p1=0.001)
    wins = 0
    for seed in range(20):
        raw = StatevectorBackend(noise, seed=seed).run(_x_chain(), 4096).expectation()
        est = ZeroNoiseExtrapolation(StatevectorBackend(noise, seed=1000 + seed)).run(_x_chain(), 4096).expectation()
        wins += abs(est - 1.0) < abs(raw - 1.0)
    assert wins >= 18


def test_stacking_order_call_trace():
    spy = Spy(StatevectorBackend(seed=0))
    chain = build_chain(spy, ["ro-error", "zne"])
    assert isinstance(chain, ZeroNoiseExtrapolation)
    assert isinstance(chain.inner, ReadoutMitigation)
    chain.run(_bell(), 200)
    # readout correction runs inside every scale; calibration happens once and is reused
    assert spy.trace == [4, "calibrate0", "calibrate1", 8, 12]

    spy = Spy(StatevectorBackend(seed=0))
    reverse = build_chain(spy, ["zne", "ro-error"])
    reverse.run(_bell(), 200)
    assert spy.trace[:3] == [4, 8, 12]

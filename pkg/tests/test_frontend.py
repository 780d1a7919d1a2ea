import math
import threading

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qkc.errors import (
    DimensionMismatch, FrontendError, KernelSyntaxError, MeasurementDependentBranchInNisqMode,
    NotUnitary, QkcError, RangeError, TooManyQubitsForSynthesis, UnbalancedBraces,
    UnknownKernelName, UnknownLanguage, UnresolvedKernel, UnsupportedQasmFeature,
    UnsupportedQuilFeature,
)
from qkc.frontend import (
    KernelRegistry, decompose_unitary, iqft_instructions, parse_kernels, qft_instructions,
)
from qkc.frontend.ast import For, GateCall
from qkc.ir import Circuit, GateKind, QubitRef, equal_up_to_phase, flatten, gate_matrix, to_unitary

from helpers import KERNELS, haar_unitary

CROSS_LANGUAGE = '''
__qpu__ void xa(qreg q) {
  H(q[0]);
  CX(q[0], q[1]);
  Rz(q[2], 0.5);
  Measure(q[0]);
}
__qpu__ void qa(qreg q) {
  using qk::openqasm;
  creg c[1];
  h q[0];
  cx q[0],q[1];
  rz(0.5) q[2];
  measure q[0] -> c[0];
}
__qpu__ void qu(qreg q) {
  using qk::quil;
  H 0
  CNOT 0 1
  RZ(0.5) 2
  MEASURE 0
}
'''


def _signature(circuit):
    return [(i.kind, i.qubits, i.params, i.slot if i.kind is GateKind.Measure else None)
            for i in flatten(circuit)]


def test_bell_source_structure():
    (kdef,) = parse_kernels((KERNELS / "bell.qk").read_text())
    assert kdef.name == "bell"
    kinds = [type(s) for s in kdef.body]
    assert kinds == [GateCall, GateCall, For]
    assert kdef.body[0].kind is GateKind.H and kdef.body[1].kind is GateKind.CX
    assert kdef.body[2].body[0].kind is GateKind.Measure


def test_bell_instantiates_to_four_instructions(registry):
    c = registry.instantiate("bell", [2])
    q = [QubitRef("q", i) for i in range(2)]
    assert [(i.kind, i.qubits) for i in flatten(c)] == [
        (GateKind.H, (q[0],)), (GateKind.CX, (q[0], q[1])),
        (GateKind.Measure, (q[0],)), (GateKind.Measure, (q[1],))]


def test_alternate_namespace_switch_and_empty_body():
    src = '__qpu__ void k(qreg q) {\n using qcor::openqasm;\n cx q[0], q[1];\n}\n__qpu__ void e(qreg q) {}'
    k, e = parse_kernels(src)
    assert [s.kind for s in k.body] == [GateKind.CX]
    assert e.body == []


def test_openqasm_broadcast_measure_and_comments():
    r = KernelRegistry()
    r.jit_compile('__qpu__ void m(qreg q) {\n using qk::openqasm;\n creg c[2];\n'
                  ' // nothing here\n barrier q;\n measure q -> c;\n}\n'
                  '__qpu__ void w(qreg q) {\n using qk::openqasm;\n // only a comment\n}')
    ms = flatten(r.instantiate("m", [2]))
    assert [(i.kind, i.qubits[0].index, i.slot) for i in ms] == [
        (GateKind.Measure, 0, 0), (GateKind.Measure, 1, 1)]
    assert flatten(r.instantiate("w", [2])) == []


def test_cross_language_equivalence():
    r = KernelRegistry()
    r.jit_compile(CROSS_LANGUAGE)
    sigs = [_signature(r.instantiate(name, [3])) for name in ("xa", "qa", "qu")]
    assert sigs[0] == sigs[1] == sigs[2]
    assert [s[0] for s in sigs[0]] == [GateKind.H, GateKind.CX, GateKind.Rz, GateKind.Measure]


@pytest.mark.parametrize("source, error", [
    ("__qpu__ void x(qreg q) { H(q[0]) }", KernelSyntaxError),
    ("__qpu__ void x(qreg q) { H(q[0]);", UnbalancedBraces),
    ("__qpu__ void x(qreg q) { using qk::foo; }", UnknownLanguage),
    ("__qpu__ void x(qreg q) { using qk::openqasm; gate foo a { h a; } }", UnsupportedQasmFeature),
    ("__qpu__ void x(qreg q) { using qk::openqasm; creg c[1]; if(c==1) x q[0]; }",
     UnsupportedQasmFeature),
    ("__qpu__ void x(qreg q) { using qk::quil; DEFCIRCUIT foo: }", UnsupportedQuilFeature),
])
def test_parse_errors_are_typed_with_position(source, error):
    with pytest.raises(error) as info:
        parse_kernels(source)
    assert info.value.line == 1 and info.value.col >= 1


def test_error_position_on_later_line():
    with pytest.raises(KernelSyntaxError) as info:
        parse_kernels("__qpu__ void x(qreg q) {\n  H(q[0]);\n  CX(q[0] q[1]);\n}")
    assert info.value.line == 3


@settings(max_examples=300, deadline=None)
@given(st.binary(max_size=200))
def test_parse_never_panics_on_bytes(data):
    text = data.decode("utf-8", errors="replace")
    try:
        parse_kernels(text)
    except QkcError:
        pass


@settings(max_examples=200, deadline=None)
@given(st.text(alphabet="__qpuvoid(){}[];,<>qreg HCXMeasure01.=+-*/#\n\"usingqk::", max_size=120))
def test_parse_never_panics_on_kernel_like_text(text):
    try:
        parse_kernels("__qpu__ void k(qreg q) {" + text)
    except QkcError:
        pass


def test_measurement_dependent_branch_rejected_in_nisq():
    r = KernelRegistry()
    r.jit_compile('__qpu__ void d(qreg q) {\n const bool m = Measure(q[0]);\n'
                  ' if (m) { X(q[1]); }\n}')
    with pytest.raises(MeasurementDependentBranchInNisqMode):
        r.instantiate("d", [2])


def test_empty_for_range_leaves_parent_unchanged():
    r = KernelRegistry()
    r.jit_compile('__qpu__ void k(qreg q) {\n for (int i = 0; i < 0; i++) { H(q[i]); }\n}')
    parent = Circuit("p")
    r.instantiate("k", [2], parent=parent)
    assert flatten(parent) == []


def test_composition_transparency(registry):
    fresh = flatten(registry.instantiate("QuantumPhaseEstimation", [4]))
    parent = Circuit("outer")
    registry.instantiate("QuantumPhaseEstimation", [4], parent=parent)
    assert flatten(parent) == fresh


def test_qpe_contains_ctrl_oracle_and_iqft(registry):
    c = registry.instantiate("QuantumPhaseEstimation", [4])
    names = set()

    def walk(node):
        for ch in node.children:
            if isinstance(ch, Circuit):
                names.add(ch.name)
                walk(ch)
    walk(c)
    assert "iqft" in names
    assert any("compositeOracle" in n for n in names)


def test_unresolved_kernel():
    r = KernelRegistry()
    r.jit_compile("__qpu__ void x(qreg q) { foo(q); }")
    with pytest.raises(UnresolvedKernel):
        r.instantiate("x", [1])


def test_registry_cache_and_unknown_name():
    r = KernelRegistry()
    src = (KERNELS / "bell.qk").read_text()
    assert r.jit_compile(src) == ["bell"]
    assert r.jit_compile(src) == ["bell"]
    assert r.compile_count == 1
    r.jit_compile(src + "\n")
    assert r.compile_count == 2
    with pytest.raises(UnknownKernelName):
        r.get_kernel("missing")


def test_registry_concurrent_compile_counts_once():
    r = KernelRegistry()
    src = (KERNELS / "ghz.qk").read_text()
    threads = [threading.Thread(target=r.jit_compile, args=(src,)) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert r.compile_count == 1


def test_include_splices_qasm(registry):
    c = registry.instantiate("grover", [3])
    kinds = [i.kind for i in flatten(c)]
    assert kinds.count(GateKind.Measure) == 2
    assert GateKind.H in kinds


def test_include_missing_file_is_frontend_error(tmp_path):
    r = KernelRegistry()
    with pytest.raises(FrontendError):
        r.jit_compile('__qpu__ void k(qreg q) {\n#include "nope.qasm"\n}', base_dir=tmp_path)


def test_adjoint_and_ctrl_kernel_calls():
    r = KernelRegistry()
    r.jit_compile('__qpu__ void tgate(qreg q) { T(q[0]); }\n'
                  '__qpu__ void u(qreg q) { tgate(q); tgate::adjoint(q); }\n'
                  '__qpu__ void c(qreg q) { tgate::ctrl(q[1], q); }')
    assert np.allclose(to_unitary(r.instantiate("u", [1]), n_qubits=1), np.eye(2), atol=1e-12)
    cu = to_unitary(r.instantiate("c", [2]), n_qubits=2)
    assert equal_up_to_phase(cu, gate_matrix(GateKind.CPhase, (math.pi / 4,)), atol=1e-9)


# decompose


def test_decompose_identity_is_empty():
    q = [QubitRef("q", i) for i in range(3)]
    assert flatten(decompose_unitary(np.eye(8), q)) == []


def test_decompose_haar_two_qubit():
    rng = np.random.default_rng(7)
    q = [QubitRef("q", i) for i in range(2)]
    for _ in range(100):
        u = haar_unitary(rng, 4)
        c = decompose_unitary(u, q)
        assert equal_up_to_phase(to_unitary(c, n_qubits=2), u, atol=1e-8)


def test_decompose_haar_three_qubit():
    rng = np.random.default_rng(11)
    q = [QubitRef("q", i) for i in range(3)]
    for _ in range(5):
        u = haar_unitary(rng, 8)
        assert equal_up_to_phase(to_unitary(decompose_unitary(u, q), n_qubits=3), u, atol=1e-8)


def test_decompose_errors():
    q = [QubitRef("q", i) for i in range(4)]
    with pytest.raises(TooManyQubitsForSynthesis):
        decompose_unitary(np.eye(16), q)
    with pytest.raises(DimensionMismatch):
        decompose_unitary(np.eye(4), q[:3])
    with pytest.raises(NotUnitary):
        decompose_unitary(np.ones((2, 2)), q[:1])


# stdlib


def test_qft_one_qubit_is_h():
    c = Circuit("qft", qft_instructions([QubitRef("q", 0)]))
    assert np.allclose(to_unitary(c, n_qubits=1), gate_matrix(GateKind.H), atol=1e-12)


@pytest.mark.parametrize("n", [2, 3])
def test_qft_matches_dft(n):
    q = [QubitRef("q", i) for i in range(n)]
    dim = 2 ** n
    j, k = np.meshgrid(np.arange(dim), np.arange(dim), indexing="ij")
    dft = np.exp(2j * np.pi * j * k / dim) / math.sqrt(dim)
    assert np.allclose(to_unitary(Circuit("qft", qft_instructions(q)), n_qubits=n), dft, atol=1e-9)


def test_qft_then_iqft_is_identity():
    q = [QubitRef("q", i) for i in range(3)]
    c = Circuit("pair", qft_instructions(q) + iqft_instructions(q))
    assert np.allclose(to_unitary(c, n_qubits=3), np.eye(8), atol=1e-9)


def test_qft_range_error():
    r = KernelRegistry()
    r.jit_compile("__qpu__ void k(qreg q) { qft(q, 1, 3); }")
    with pytest.raises(RangeError):
        r.instantiate("k", [3])

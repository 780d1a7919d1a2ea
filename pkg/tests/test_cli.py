import io
import json
import subprocess
import sys

import pytest

from qkc.cli import build_parser, main, split_args
from qkc.frontend import KernelRegistry
from qkc.ir import flatten, print_circuit
from qkc.placement import load_graph

from helpers import KERNELS

BELL = str(KERNELS / "bell.qk")
GHZ = str(KERNELS / "ghz.qk")
QPE = str(KERNELS / "qpe.qk")
QEC = str(KERNELS / "qec.qk")
VQE = str(KERNELS / "vqe.qk")
DEUTERON = "5.907 - 2.1433 X0 X1 - 2.1433 Y0 Y1 + .21829 Z0 - 6.125 Z1"


def run_cli(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def test_single_and_double_dash_flags_agree():
    parser = build_parser()
    single = parser.parse_args(["run", BELL, "-qpu", "sim:seed=3", "-shots", "10", "-opt", "1",
                                "-opt-pass", "circuit-optimizer", "-opt-pass", "rotation-folding",
                                "-qubit-map", "1,0", "-em", "ro-error", "-em", "zne", "-qrt", "nisq"])
    double = parser.parse_args(["run", BELL, "--qpu", "sim:seed=3", "--shots", "10", "--opt", "1",
                                "--opt-pass", "circuit-optimizer", "--opt-pass", "rotation-folding",
                                "--qubit-map", "1,0", "--em", "ro-error", "--em", "zne", "--qrt", "nisq"])
    assert vars(single) == vars(double)
    assert single.opt_pass == ["circuit-optimizer", "rotation-folding"]
    assert single.em == ["ro-error", "zne"]


def test_split_args_respects_brackets():
    assert split_args("2, [0.1,0.2], 3") == ["2", "[0.1,0.2]", "3"]
    assert split_args("") == []


def test_run_bell_counts():
    code, out = run_cli("run", BELL, "--args", "2", "--seed", "1")
    assert code == 0
    payload = json.loads(out)
    assert payload["shots"] == 1024 and set(payload["counts"]) <= {"00", "11"}
    assert all(400 <= v <= 624 for v in payload["counts"].values())


def test_run_qpe():
    code, out = run_cli("run", QPE, "--args", "4", "-shots", "256")
    assert code == 0 and json.loads(out) == {"counts": {"100": 256}, "shots": 256}


@pytest.mark.parametrize("inject", [None, 0, 1, 2])
def test_run_qec_ftqc_deterministic(inject):
    argv = ["run", QEC, "-qrt", "ftqc", "--args", "4,1", "-shots", "50"]
    if inject is not None:
        argv += ["--inject-x", str(inject)]
    code, out = run_cli(*argv)
    assert code == 0 and json.loads(out)["counts"] == {"1110": 50}


def test_run_with_mitigation_reports_expectation():
    code, out = run_cli("run", BELL, "--args", "2", "-em", "ro-error", "-em", "zne", "--seed", "4",
                        "-shots", "200")
    payload = json.loads(out)
    assert code == 0 and payload["exp_val_z"] == pytest.approx(1.0, abs=1e-9)


def test_run_observable():
    code, out = run_cli("run", VQE, "--entry", "ansatz", "--args", "2,0.59", "--observable", DEUTERON,
                        "-shots", "4096", "--seed", "2")
    payload = json.loads(out)
    assert code == 0 and payload["shots"] == 4096
    assert payload["expectation"] == pytest.approx(-1.7489, abs=0.25)


def test_seeded_stdout_is_byte_identical():
    argv = ["run", GHZ, "--args", "5", "--seed", "11", "-qpu", "sim[seed:11]", "--placement", "sabre",
            "--coupling-graph", "vigo"]
    first = subprocess.run([sys.executable, "-m", "qkc.cli", *argv], capture_output=True, check=True)
    second = subprocess.run([sys.executable, "-m", "qkc.cli", *argv], capture_output=True, check=True)
    assert first.stdout == second.stdout and first.stdout


def test_console_script_lists_passes():
    proc = subprocess.run(["qkc", "passes"], capture_output=True, text=True)
    assert proc.returncode == 0 and "circuit-optimizer" in proc.stdout.split()


@pytest.mark.parametrize("command, expected", [
    ("passes", {"circuit-optimizer", "rotation-folding", "single-qubit-gate-merging"}),
    ("placements", {"ssp", "sabre"}),
    ("backends", {"sim"}),
    ("mitigations", {"ro-error", "zne"}),
])
def test_list_subcommands(command, expected):
    code, out = run_cli(command)
    assert code == 0 and expected <= set(out.split())


def test_compile_ghz_on_vigo():
    code, out = run_cli("compile", GHZ, "--args", "5", "--placement", "ssp", "--coupling-graph", "vigo")
    assert code == 0
    vigo = load_graph("vigo")
    pairs = [line.split()[1] for line in out.splitlines() if line.startswith(("CNOT", "CX", "Swap"))]
    assert pairs
    for p in pairs:
        a, b = (int(t.lstrip("q")) for t in p.split(","))
        assert vigo.has_edge(a, b)


def test_compile_opt0_matches_instantiation():
    r = KernelRegistry()
    r.load_file(QPE)
    expected = io.StringIO()
    print_circuit(flatten(r.instantiate("QuantumPhaseEstimation", [4])), expected)
    code, out = run_cli("compile", QPE, "--args", "4", "--opt", "0")
    assert code == 0 and out == expected.getvalue()


def test_compile_pass_stats_reduced(tmp_path):
    path = tmp_path / "stats.json"
    code, out = run_cli("compile", str(KERNELS / "corpus" / "hh_cancel.qk"), "--args", "2", "-opt", "1",
                        "--emit-pass-stats", str(path))
    assert code == 0
    report = json.loads(path.read_text())
    assert [r["name"] for r in report] == ["rotation-folding", "single-qubit-gate-merging", "circuit-optimizer"]
    assert report[-1]["after"]["total_gates"] < report[0]["before"]["total_gates"]


def test_opt_pass_overrides_level(tmp_path):
    path = tmp_path / "stats.json"
    run_cli("compile", str(KERNELS / "corpus" / "hh_cancel.qk"), "--args", "2", "-opt", "1",
            "-opt-pass", "circuit-optimizer", "--emit-pass-stats", str(path))
    assert [r["name"] for r in json.loads(path.read_text())] == ["circuit-optimizer"]


def test_qubit_map_relabels():
    code, out = run_cli("compile", BELL, "--args", "2", "-qubit-map", "5,6")
    assert code == 0 and "q5" in out and "q6" in out and "q0" not in out


@pytest.mark.parametrize("argv", [
    ["run", BELL, "--args", "2", "-qpu", "aer"],
    ["run", BELL, "--args", "2,3"],
    ["run", BELL, "--args", "x"],
    ["run", BELL, "--args", "2", "-em", "mitiq"],
    ["run", BELL, "--args", "2", "-opt-pass", "voqc"],
    ["run", BELL, "--args", "2", "-qubit-map", "1,1", "--coupling-graph", "vigo"],
    ["run", BELL, "--args", "2", "--placement", "ssp"],
    ["run", BELL, "--args", "2", "-qrt", "ftqc", "-em", "zne"],
    ["run", str(KERNELS / "missing.qk"), "--args", "2"],
    ["run", BELL, "--args", "2", "-shots", "0"],
    ["run", BELL, "--args", "2", "--observable", "X0 $"],
    ["run", BELL, "--bogus"],
])
def test_input_errors_exit_one(argv, capsys):
    code, _ = run_cli(*argv) if "--bogus" not in argv else (None, None)
    if code is None:
        with pytest.raises(SystemExit) as info:
            main(argv)
        code = info.value.code
    assert code == 1
    assert "error" in capsys.readouterr().err


def test_parse_error_reports_position(tmp_path, capsys):
    bad = tmp_path / "bad.qk"
    bad.write_text("__qpu__ void k(qreg q) {\n  H(q[0])\n}\n")
    code, _ = run_cli("compile", str(bad), "--args", "1")
    assert code == 1
    assert f"{bad}:3:1" in capsys.readouterr().err


def test_capacity_error_exits_two(capsys):
    code, _ = run_cli("run", BELL, "--args", "30")
    assert code == 2 and "resource" in capsys.readouterr().err

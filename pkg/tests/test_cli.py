import json
import subprocess
import sys

import numpy as np
import pytest

from tcpkit.cli import EXIT_INPUT, EXIT_NEGATIVE, EXIT_OK, main
from tcpkit.io import write_tensor_file
from tcpkit.tensor import Tensor


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


@pytest.fixture
def ex0_file(tmp_path, ex0):
    path = tmp_path / "ex0.json"
    write_tensor_file(ex0, path)
    return str(path)


def test_classify_file(capsys, ex0_file):
    code, doc = run_json(capsys, "classify", ex0_file, "--props", "z,m")
    assert code == EXIT_OK
    assert [v["property"] for v in doc["verdicts"]] == ["z", "strong_m"]
    assert all(v["status"] == "true" for v in doc["verdicts"])


def test_classify_unknown_property(capsys):
    code, _, err = run(capsys, "classify", "fixture:identity_m3", "--props", "z,bogus")
    assert code == EXIT_INPUT and "bogus" in err


def test_spectral(capsys):
    code, doc = run_json(capsys, "spectral", "fixture:identity_m3")
    assert code == EXIT_OK and abs(doc["rho"] - 1.0) <= 1e-10
    assert run(capsys, "spectral", "fixture:alpha0")[0] == EXIT_INPUT


def test_solve_newton_and_fixed_point(capsys):
    code, doc = run_json(capsys, "solve", "fixture:alpha0", "--q", "0,-1", "--x0", "0.1,2")
    assert code == EXIT_OK
    np.testing.assert_allclose(doc["x"], [0.0, 1.0], atol=1e-10)
    code, doc = run_json(capsys, "solve", "fixture:alpha0", "--q", "0,-1", "--method", "fixed-point")
    assert code == EXIT_OK
    np.testing.assert_allclose(doc["x"], [0.0, 1.0], atol=1e-9)


def test_solve_fixed_point_options(capsys):
    A = "fixture:identity_m2"
    code, doc = run_json(capsys, "solve", A, "--q", "0,0", "--method", "fixed-point")
    assert code == EXIT_OK
    code, _, _ = run(capsys, "solve", A, "--q", "1,1", "--method", "fixed-point", "--x0", "1,1")
    assert code == EXIT_INPUT


def test_solve_negative_outcome(capsys, tmp_path):
    path = tmp_path / "neg.json"
    write_tensor_file(-Tensor.identity(2, 2), path)
    code, doc = run_json(capsys, "solve", str(path), "--q=-1,-1")
    assert code == EXIT_NEGATIVE and doc["solution"] is None


def test_enumerate(capsys):
    code, doc = run_json(capsys, "enumerate", "fixture:alpha0", "--q", "0,-1")
    assert code == EXIT_OK
    assert [s["x"] for s in doc["solutions"]] == [[0.0, 1.0], [2.0, 1.0]]


def test_degree(capsys):
    code, doc = run_json(capsys, "degree", "fixture:identity_m4", "--map", "Phi", "--probes", "2")
    assert code == EXIT_OK and doc["value"] == 1


def test_degree_refused(capsys, tmp_path):
    path = tmp_path / "zero.json"
    write_tensor_file(Tensor.zeros(3, 2), path)
    code, doc = run_json(capsys, "degree", str(path))
    assert code == EXIT_NEGATIVE and doc["value"] is None and "refused" in doc


def test_verify_text_and_output(capsys, tmp_path):
    out = tmp_path / "report.json"
    code, text, _ = run(capsys, "verify", "--tags", "Ex5.2", "--format", "text", "--output", str(out))
    assert code == EXIT_OK
    assert text.splitlines() == ["Ex5.2  pass=2 fail=0 skip=0", "ok"]
    assert json.loads(out.read_text())["ok"] is True


def test_verify_bad_tag(capsys):
    assert run(capsys, "verify", "--tags", "T9.9")[0] == EXIT_INPUT


def test_text_format(capsys):
    code, text, _ = run(capsys, "spectral", "fixture:identity_m3", "--format", "text")
    assert code == EXIT_OK and "rho: 1" in text and "converged: true" in text


def test_quiet(capsys):
    assert run(capsys, "spectral", "fixture:identity_m3", "--quiet") == (EXIT_OK, "", "")


def test_seed_from_environment(capsys, monkeypatch):
    argv = ("classify", "fixture:alpha4", "--props", "sm")
    monkeypatch.setenv("TCPKIT_SEED", "0x2A")
    code, a, _ = run(capsys, *argv)
    b = run(capsys, *argv, "--seed", "42")[1]
    assert code == EXIT_OK and a and a == b
    monkeypatch.setenv("TCPKIT_SEED", "nope")
    assert run(capsys, *argv)[0] == EXIT_INPUT


@pytest.mark.parametrize("argv", [
    [],
    ["bogus"],
    ["solve", "fixture:identity_m3"],
    ["classify", "fixture:nope"],
    ["classify", "/no/such/file.json"],
    ["solve", "fixture:identity_m3", "--q", "1,2,3"],
])
def test_input_errors(capsys, argv):
    assert run(capsys, *argv)[0] == EXIT_INPUT


def test_malformed_file_message(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"order": 2, "dim": 2, "entries": [[[1, 3], 1]]}')
    code, _, err = run(capsys, "classify", str(path))
    assert code == EXIT_INPUT and "out of range" in err


def test_help_exits_zero(capsys):
    assert run(capsys, "--help")[0] == EXIT_OK


def test_console_script_round_trip(tmp_path, ex4):
    path = tmp_path / "ex4.json"
    write_tensor_file(ex4, path)
    proc = subprocess.run([sys.executable, "-m", "tcpkit.cli", "classify", str(path), "--props", "z"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["verdicts"][0]["status"] == "true"

import json
import subprocess
import sys

import numpy as np
import pytest

from conecert.cli import run
from conecert.counterexample import A1, A2, B1, B2
from conecert.linalg import write_matrix


@pytest.fixture
def files(tmp_path):
    def mat(name, M):
        p = tmp_path / name
        write_matrix(p, np.asarray(M, dtype=float))
        return str(p)

    def spec(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)

    paths = {
        "orthant2": spec("orthant2.spec", "orthant 2\n"),
        "rot2": spec("rot2.spec", "rotated 2\n0.6 -0.8\n0.8 0.6\n"),
        "stable2": mat("stable2.mat", [[-2, 1], [1, -2]]),
        "unstable2": mat("unstable2.mat", [[0, 1], [1, 0]]),
        "nonmetzler": mat("nonmetzler.mat", [[-1, -0.1], [0, -1]]),
        "diag": mat("diag.mat", [[2, 0], [0, 0.5]]),
        "notdiag": mat("notdiag.mat", [[1, 1], [0, 1]]),
        "A1": mat("a1.mat", A1), "B1": mat("b1.mat", B1),
        "A2": mat("a2.mat", A2), "B2": mat("b2.mat", B2),
        "dir": tmp_path,
    }
    return paths


def test_stability(files, capsys):
    assert run(["stability", "-A", files["stable2"], "-K", files["orthant2"]]) == 0
    assert "v =" in capsys.readouterr().out
    assert run(["stability", "-A", files["unstable2"], "-K", files["orthant2"]]) == 1


def test_check_qm(files, capsys):
    assert run(["check-qm", "-A", files["stable2"], "-K", files["orthant2"]]) == 0
    assert run(["check-qm", "-A", files["nonmetzler"], "-K", files["orthant2"]]) == 1
    assert "violation at generator pair (0, 1)" in capsys.readouterr().out


def test_check_diffusive_and_nonneg(files):
    assert run(["check-diffusive", "-D", files["diag"], "-K", files["orthant2"]]) == 0
    assert run(["check-diffusive", "-D", files["notdiag"], "-K", files["orthant2"]]) == 1
    assert run(["check-nonneg", "-B", files["B1"], "-K", files["orthant2"]]) == 0
    assert run(["check-nonneg", "-B", files["nonmetzler"], "-K", files["orthant2"]]) == 1


def test_json_format(files, capsys):
    assert run(["check-qm", "-A", files["nonmetzler"], "-K", files["orthant2"],
                "--format", "json"]) == 1
    data = json.loads(capsys.readouterr().out)
    assert data["verdict"] is False
    assert data["violations"][0][:2] == [0, 1]


@pytest.mark.parametrize("kind", ["lyapunov", "riccati"])
@pytest.mark.parametrize("cone", ["orthant2", "rot2"])
def test_certificate_roundtrip(files, kind, cone):
    out = str(files["dir"] / f"{kind}-{cone}.json")
    A = files["A1"]
    if cone == "rot2":
        O = np.array([[0.6, -0.8], [0.8, 0.6]])
        A = str(files["dir"] / "a1rot.mat")
        write_matrix(A, O @ A1 @ O.T)
        B = str(files["dir"] / "b1rot.mat")
        write_matrix(B, O @ B1 @ O.T)
    else:
        B = files["B1"]
    args = [kind, "-A", A, "-K", files[cone], "-o", out]
    if kind == "riccati":
        args[3:3] = ["-B", B]
    assert run(args) == 0
    assert run(["verify", out]) == 0
    original = open(out).read()
    for i, j in [(0, 0), (0, 1)]:
        data = json.loads(original)
        data["D"][i][j] += 1e-3
        with open(out, "w") as fh:
            json.dump(data, fh)
        assert run(["verify", out]) == 1


def test_lyapunov_precondition_exit(files, capsys):
    assert run(["lyapunov", "-A", files["unstable2"], "-K", files["orthant2"]]) == 1
    assert "precondition failed" in capsys.readouterr().err


def test_d_stability(files):
    assert run(["d-stability", "-A", files["stable2"], "-E", files["diag"], "-K", files["orthant2"]]) == 0


def test_common_riccati(files):
    out = str(files["dir"] / "joint.json")
    pairs = [files[k] for k in ("A1", "B1", "A2", "B2")]
    assert run(["common-riccati", "--pairs", *pairs, "--resolution", "60", "-o", out]) == 1
    report = json.loads(open(out).read())
    assert report["verdict"] == "InfeasibleCertified"
    assert {"inputs", "checks", "verdict", "bound", "mesh", "lipschitz"} <= set(report)
    assert report["bound"] > 0
    assert run(["common-riccati", "--pairs", files["A1"], files["B1"]]) == 0
    assert run(["common-riccati", "--pairs", files["A1"]]) == 3


def test_common_lyapunov(files):
    assert run(["common-lyapunov", "--matrices", files["A1"], files["A2"]]) == 0
    assert run(["common-lyapunov", "--matrices", files["unstable2"]]) == 1


def test_reproduce_counterexample(files):
    out = str(files["dir"] / "report.json")
    assert run(["reproduce-counterexample", "-o", out]) == 0
    report = json.loads(open(out).read())
    assert report["verdict"] == "InfeasibleCertified"
    assert report["bound"] > 0


def test_psd_demo(capsys):
    assert run(["psd-demo"]) == 0
    assert "<X, A Y A> = 1" in capsys.readouterr().out


def test_parse_error_exit(files, capsys):
    bad = files["dir"] / "bad.mat"
    bad.write_text("2 2\n1 2\n3 oops\n")
    assert run(["check-qm", "-A", str(bad), "-K", files["orthant2"]]) == 3
    assert "bad.mat:3:3" in capsys.readouterr().err


def test_missing_file_and_bad_args(files):
    assert run(["check-qm", "-A", "nope.mat", "-K", files["orthant2"]]) == 3
    assert run(["no-such-command"]) == 3


def test_env_tolerance(files, monkeypatch, capsys):
    monkeypatch.setenv("CONECERT_TOL", "0.2")
    assert run(["check-qm", "-A", files["nonmetzler"], "-K", files["orthant2"]]) == 0
    monkeypatch.setenv("CONECERT_TOL", "-1")
    assert run(["check-qm", "-A", files["nonmetzler"], "-K", files["orthant2"]]) == 3


def test_deterministic_output(files, capsys):
    args = ["common-riccati", "--pairs", files["A1"], files["B1"], files["A2"], files["B2"],
            "--format", "json"]
    run(args)
    first = capsys.readouterr().out
    run(args)
    assert capsys.readouterr().out == first


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "conecert.cli", "psd-demo"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "not diffusive" in proc.stdout

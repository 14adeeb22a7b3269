import json
import math

import numpy as np
import pytest

from soliton_forge.cli import main
from soliton_forge.geometry import read_csv_table

HALF = ["--class", "shrinking", "--lambda", "-0.5"]
CANONICAL = ["--class", "steady", "--base-dim", "1", "--umin", "0"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_criticals(capsys):
    code, out, _ = run(capsys, "criticals", *HALF)
    data = json.loads(out)
    assert code == 0
    assert data["E0"] == pytest.approx(math.sqrt(2), abs=1e-9)
    assert data["E1"] == pytest.approx(0.530, abs=0.01)


def test_criticals_two_eigenvalues(capsys):
    code, out, _ = run(capsys, "criticals", "--class", "shrinking", "--lambda", "-0.5", "--lambda", "-0.5")
    assert code == 0 and json.loads(out)["E0"] == pytest.approx(1.8454660914, abs=1e-9)


def test_criticals_steady_refused(capsys):
    code, _, err = run(capsys, "criticals", *CANONICAL)
    assert code == 1 and "criticals defined for shrinking only" in err


def test_construct_canonical(capsys, tmp_path):
    out = tmp_path / "t.csv"
    code, _, _ = run(capsys, "construct", *CANONICAL, "--E", "-1", "--out", str(out))
    assert code == 0
    text = out.read_text()
    assert text.splitlines()[0] == "U,phi,t,r,f,ric_fiber,ric_base_1,scalar_c,identity_residual,ode_residual"
    header, data = read_csv_table(text)
    assert data.shape[0] == 201
    assert np.all(np.abs(data[:, header.index("identity_residual")]) <= 1e-8)


def test_construct_ill_defined(capsys):
    code, out, err = run(capsys, "construct", *HALF, "--E", "2")
    assert code == 2 and out == "" and "ill-defined" in err


def test_construct_e0_json(capsys):
    code, out, _ = run(capsys, "construct", *HALF, "--E-mode", "E0", "--format", "json", "--samples", "20")
    data = json.loads(out)
    assert code == 0
    assert data["umax"] == "inf" and data["u_cap"] == pytest.approx(49.0)
    assert len(data["rows"]) == 21


def test_classify(capsys):
    code, out, _ = run(capsys, "classify", *HALF, "--E-mode", "E1")
    data = json.loads(out)
    assert code == 0 and data["case"] == "CompactProjective"
    assert data["umax"] == pytest.approx(1.0, abs=1e-9)
    code, out, _ = run(capsys, "classify", "--class", "expanding", "--lambda", "-2", "--E", "-1")
    assert json.loads(out)["case"] == "CompleteNoncompact"
    code, out, _ = run(capsys, "classify", *CANONICAL, "--E", "0.5")
    assert code == 0 and json.loads(out)["case"] == "IllDefined"


def test_sweep(capsys):
    code, out, _ = run(capsys, "sweep", *CANONICAL, "--E-min", "-2", "--E-max", "1", "--steps", "30")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "E,case,umax,E0,E1" and len(lines) == 31
    for line in lines[1:]:
        E, case = float(line.split(",")[0]), line.split(",")[1]
        assert case == ("CompleteNoncompact" if E < 0 else "IllDefined")


def test_sweep_single_step(capsys):
    code, out, _ = run(capsys, "sweep", *HALF, "--E-min", "0.7", "--E-max", "0.7", "--steps", "1")
    assert code == 0 and len(out.splitlines()) == 2


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", *CANONICAL, "--E", "-1", "--samples", "60")
    assert code == 0 and out.count("PASS") == 7
    code, _, _ = run(capsys, "verify", *HALF, "--E-mode", "E0", "--samples", "60")
    assert code == 0


def test_verify_corrupted_tolerance(capsys):
    code, _, err = run(capsys, "verify", *CANONICAL, "--E", "-1", "--samples", "20", "--tol", "-1")
    assert code == 3 and "ode_residual" in err


def test_invalid_spec(capsys):
    code, _, err = run(capsys, "classify", "--class", "shrinking", "--lambda", "-1.5", "--E", "1")
    assert code == 1 and "lambda[0]" in err
    code, _, _ = run(capsys, "classify", "--class", "steady", "--base-dim", "1", "--E", "-1")
    assert code == 1  # steady needs umin
    code, _, _ = run(capsys, "classify", "--class", "expanding", "--lambda", "-2", "--E-mode", "E0")
    assert code == 1


def test_job_file_and_override(capsys, tmp_path):
    job = tmp_path / "job.json"
    job.write_text(json.dumps({"class": "shrinking", "base_dim": 1, "lambdas": [-0.5], "E": 0.3}))
    code, out, _ = run(capsys, "classify", "--job", str(job))
    assert json.loads(out)["case"] == "IncompleteAtInfinity"
    code, out, _ = run(capsys, "classify", "--job", str(job), "--E", "2")
    assert json.loads(out)["case"] == "IllDefined"


def test_numerical_failure_exit(capsys, monkeypatch):
    from soliton_forge import cli
    from soliton_forge.errors import NoSignChange

    def boom(spec):
        raise NoSignChange("no bracket")

    monkeypatch.setattr(cli, "critical_values", boom)
    code, _, err = run(capsys, "criticals", *HALF)
    assert code == 3 and "NoSignChange" in err

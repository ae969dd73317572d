from chebsos.cli import main, parse_range
from chebsos.solvers import SolverError
from unittest.mock import patch
import argparse
import json
import pytest

MOTZKIN = "x1^4*x2^2 + x1^2*x2^4 - x1^2*x2^2 + 1/27"


def test_parse_range():
    assert parse_range("1-3,6") == [1, 2, 3, 6]
    assert parse_range("4") == [4]
    for text in ["3-1", "a", ","]:
        with pytest.raises(argparse.ArgumentTypeError):
            parse_range(text)


def test_lower_bound(capsys):
    assert main(["lower-bound", "x", "--r", "1"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "-1.000000"
    assert out[1] == "status: optimal"
    assert out[2].startswith("jackson a-priori gap:")


def test_lower_bound_from_file(tmp_path, capsys):
    path = tmp_path / "motzkin.txt"
    path.write_text(MOTZKIN)
    gram = tmp_path / "gram.json"
    assert main(["lower-bound", str(path), "--r", "6", "--gram-out", str(gram)]) == 0
    value = float(capsys.readouterr().out.splitlines()[0])
    assert abs(value) < 1e-5
    payload = json.loads(gram.read_text())
    assert "sos" in payload
    assert len(payload["sos"]["basis"]) == len(payload["sos"]["gram"])


def test_lower_bound_grid_comparison(capsys):
    assert main(["lower-bound", "x^2 - x", "--r", "2", "--compare-grid"]) == 0
    out = capsys.readouterr().out
    assert "grid minimum: -0.250000" in out


def test_input_errors(capsys):
    assert main(["lower-bound", "x", "--r", "0"]) == 1
    assert main(["lower-bound", "x1 +* 2", "--r", "2"]) == 1
    assert "input error" in capsys.readouterr().err


def test_argument_errors_exit_with_input_code():
    with pytest.raises(SystemExit) as e:
        main(["lower-bound", "x"])
    assert e.value.code == 1


def test_solver_errors_exit_with_solver_code(capsys):
    with patch("chebsos.cli.lower_bound", side_effect=SolverError("diverged")):
        assert main(["lower-bound", "x", "--r", "1"]) == 2
    assert "diverged" in capsys.readouterr().err


def test_certify_and_verify(tmp_path, capsys):
    path = tmp_path / "cert.json"
    assert main(["certify-norm", "x1^3 - 2*x1*x2 + 0.5", "--out", str(path)]) == 0
    out = capsys.readouterr().out
    assert out.startswith("summands: ")
    assert main(["verify-certificate", str(path)]) == 0

    payload = json.loads(path.read_text())
    payload["summands"][0]["sos"][0]["w"] += 1.0
    path.write_text(json.dumps(payload))
    assert main(["verify-certificate", str(path)]) == 3
    assert "rejected" in capsys.readouterr().err


def test_rho(capsys):
    assert main(["rho", "-x^2", "--d", "1"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0].startswith("rho: ")
    assert float(out[0].split()[1]) == pytest.approx(1.0, abs=1e-5)
    assert len(out[1].split()) == 3
    assert out[2] == "status: optimal"


def test_theta_table_csv(tmp_path, capsys):
    assert main(["theta-table", "--n", "1", "--d", "1-2", "--r", "1-2", "--quiet"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "r,1,2"
    assert out[2] == "2,0.2929,0.5556"

    path = tmp_path / "theta.json"
    args = ["theta-table", "--n", "1", "--d", "1", "--r", "1", "--quiet"]
    assert main(args + ["--out", str(path), "--format", "json"]) == 0
    assert json.loads(path.read_text())[0]["bound"] == pytest.approx(0.5, abs=1e-4)


def test_theta_table_caps_n(monkeypatch, capsys):
    monkeypatch.setenv("CHEBSOS_MAX_THETA_NVARS", "3")
    assert main(["theta-table", "--n", "4", "--d", "1", "--r", "1"]) == 1
    assert "--allow-large-n" in capsys.readouterr().err


def test_jackson_smooth(tmp_path, capsys):
    assert main(["jackson-smooth", "x^2", "--r", "2"]) == 0
    out = capsys.readouterr().out
    # x^2 = (T0 + T2) / 2 and lambda_2 = 1/4 for r = 2
    assert "0.125*T[2]" in out
    assert "smoothing error: 3.750000e-01" in out

    path = tmp_path / "smoothed.json"
    assert main(["jackson-smooth", "x^2", "--r", "2", "--out", str(path)]) == 0
    assert json.loads(path.read_text())["nvars"] == 1


def test_verify_hand_written_certificate(tmp_path):
    one = {"nvars": 1, "basis": "monomial", "terms": [{"alpha": [0], "c": 1.0}]}
    payload = {
        "target": {
            "nvars": 1,
            "basis": "monomial",
            "terms": [{"alpha": [0], "c": 1.0}, {"alpha": [2], "c": -1.0}],
        },
        "summands": [
            {"I": [{"i": 0, "sign": 1}, {"i": 0, "sign": -1}], "sos": [{"w": 1.0, "q": one}]}
        ],
    }
    path = tmp_path / "cert.json"
    path.write_text(json.dumps(payload))
    assert main(["verify-certificate", str(path)]) == 0


def test_choices_show_plain_values(capsys):
    with pytest.raises(SystemExit):
        main(["theta-table", "--n", "1", "--d", "1", "--r", "1", "--format", "xml"])
    err = capsys.readouterr().err
    assert "csv" in err
    assert "OutputFormat" not in err


def test_squares_scheme_from_command_line(capsys):
    assert main(["lower-bound", "1 - x^2", "--r", "2", "--scheme", "squares"]) == 0
    assert float(capsys.readouterr().out.splitlines()[0]) == pytest.approx(0.0, abs=1e-6)
    assert main(["lower-bound", "x^3", "--r", "3", "--scheme", "squares"]) == 1

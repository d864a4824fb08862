import json
import math

import pytest

from electrovac.cli import cmd_bounds, cmd_reduce, cmd_separability, cmd_verify, main, parse_tolerances
from electrovac.shared.utils import ConfigError


def _last_error(captured) -> dict:
    lines = [line for line in captured.err.splitlines() if line.startswith("{")]
    return json.loads(lines[-1])


def test_verify_writes_report_and_csv(config_path, tmp_path):
    report_path = tmp_path / "report.json"
    csv_path = tmp_path / "points.csv"
    code = main([
        "verify", "--config", config_path("mp_single.json"),
        "--points", "100", "--out", str(report_path), "--csv", str(csv_path),
    ])
    assert code == 0
    report = json.loads(report_path.read_text())
    assert report["verdict"] == "pass"
    assert report["points"]["accepted"] == 100
    assert report["config"]["points"] == 100
    assert len(csv_path.read_text().splitlines()) == 101


def test_verify_prints_to_stdout_without_out(config_path, capsys):
    assert main(["verify", "--config", config_path("dilation_n3.json"), "--points", "50"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["solution"]["family"] == "dilation"
    assert set(report["channels"]) >= {"trace", "lapse", "maxwell", "hessian_max"}


def test_run_is_reproducible_from_embedded_config(config_path, tmp_path):
    first, second, replay = (tmp_path / name for name in ("a.json", "b.json", "replay.json"))
    args = ["verify", "--config", config_path("mp_three_n4.json"), "--points", "60", "--seed", "9"]
    assert main(args + ["--out", str(first)]) == 0
    assert main(args + ["--out", str(second)]) == 0
    a = json.loads(first.read_text())
    b = json.loads(second.read_text())
    a.pop("timestamp"), b.pop("timestamp")
    assert a == b

    embedded = dict(a["config"])
    embedded["output"] = {"report": str(replay), "csv": None}
    config_copy = tmp_path / "embedded.json"
    config_copy.write_text(json.dumps(embedded))
    assert main(["verify", "--config", str(config_copy)]) == 0
    c = json.loads(replay.read_text())
    assert c["channels"] == a["channels"]
    assert c["seed"] == 9


def test_malformed_config_exits_2(tmp_path, capsys):
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    assert main(["verify", "--config", str(broken)]) == 2
    assert _last_error(capsys.readouterr())["error"] == "ConfigError"


def test_missing_config_argument_exits_2(capsys):
    assert main(["verify"]) == 2
    assert _last_error(capsys.readouterr())["error"] == "UsageError"


def test_unknown_command_exits_2(capsys):
    assert main(["certify", "--config", "x.json"]) == 2
    assert _last_error(capsys.readouterr())["error"] == "UsageError"


def test_bad_tolerance_override_exits_2(config_path, capsys):
    assert main(["verify", "--config", config_path("mp_single.json"), "--tolerance", "trace"]) == 2
    assert _last_error(capsys.readouterr())["error"] == "ConfigError"
    assert main(["verify", "--config", config_path("mp_single.json"), "--tolerance", "nothing=1e-6"]) == 2


def test_tight_tolerance_fails_verdict(config_path, capsys):
    code = main([
        "verify", "--config", config_path("dilation_n3.json"),
        "--points", "50", "--tolerance", "hessian_max=1e-300", "--tolerance", "trace=1e-300",
    ])
    report = json.loads(capsys.readouterr().out)
    assert code == 1
    assert report["verdict"] == "fail"
    assert report["channels"]["hessian_max"]["tolerance"] == 1e-300


def test_parse_tolerances():
    assert parse_tolerances(["trace=1e-6", " lapse =2e-7"]) == {"trace": 1e-6, "lapse": 2e-7}
    with pytest.raises(ConfigError):
        parse_tolerances(["trace=abc"])
    with pytest.raises(ConfigError):
        parse_tolerances(["=1e-6"])


def test_cmd_verify(config_path, tmp_path):
    out = tmp_path / "out.json"
    assert cmd_verify(config_path("dilation_n4.json"), points=40, out=str(out)) == 0
    assert json.loads(out.read_text())["verdict"] == "pass"


def test_reduce_rotation(config_path, tmp_path):
    out = tmp_path / "reduce.json"
    trajectory = tmp_path / "trajectory.csv"
    code = main([
        "reduce", "--config", config_path("quadric_rotation.json"),
        "--points", "100", "--out", str(out), "--csv", str(trajectory),
    ])
    assert code == 0
    result = json.loads(out.read_text())
    assert result["mode"] == "quadric"
    assert result["verdict"] == "pass"
    assert result["trajectory"]["constraint_max"] <= 1e-8
    assert result["trajectory"]["final_state"]["N"] == pytest.approx(2.0 / 3.0, abs=1e-8)
    assert max(result["mp_class_drift"].values()) <= 1e-8
    assert result["lifted"]["verdict"] == "pass"
    assert trajectory.read_text().startswith("xi,phi,dphi,N,dN,psi,dpsi")


def test_reduce_translation(config_path, capsys):
    assert main(["reduce", "--config", config_path("quadric_translation.json"), "--points", "50"]) == 0
    result = json.loads(capsys.readouterr().out)
    assert 1.0 / result["trajectory"]["final_state"]["N"] == pytest.approx(2.5, abs=1e-9)


def test_reduce_lapse(config_path, capsys):
    assert main(["reduce", "--config", config_path("lapse_dilation.json"), "--points", "50"]) == 0
    result = json.loads(capsys.readouterr().out)
    assert result["profile"]["closed_form"] == "arctan_lapse"
    assert result["profile"]["anchor"] == 0.5
    assert result["lifted"]["verdict"] == "pass"


def test_reduce_singular_start_exits_1(tmp_path, capsys):
    config = {
        "command": "reduce",
        "reduction": {
            "mode": "quadric",
            "invariant": {"kind": "quadric", "n": 3, "tau": 1.0, "gamma": [0, 0, 0], "theta": [0, 0, 0]},
            "initial": {"kind": "mp", "xi0": 0.0, "U": 2.0, "dU": -0.5},
            "xi_end": 1.0,
        },
    }
    path = tmp_path / "singular.json"
    path.write_text(json.dumps(config))
    assert main(["reduce", "--config", str(path)]) == 1
    assert _last_error(capsys.readouterr())["error"] == "SingularCoefficientError"


def test_separability_verdicts(config_path, tmp_path, capsys):
    assert main(["separability", "--config", config_path("separability_cubic.json")]) == 1
    cubic = json.loads(capsys.readouterr().out)
    assert cubic["verdict"] == "non-separable"
    assert cubic["max_spread"] > 1e-2

    config = {
        "command": "separability",
        "invariant": {"kind": "dilation", "n": 3, "a": [1.0], "b": [1.0, 1.0]},
        "levels": [0.25, 1.0, 2.0],
        "points": 16,
    }
    path = tmp_path / "dilation.json"
    path.write_text(json.dumps(config))
    assert main(["separability", "--config", str(path)]) == 0
    assert json.loads(capsys.readouterr().out)["verdict"] == "separable"


def test_bounds(config_path, tmp_path):
    out = tmp_path / "bounds.json"
    assert main(["bounds", "--config", config_path("bounds_dilation.json"), "--points", "200", "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert payload["A"] == pytest.approx(2.0 - math.pi / 2.0, abs=1e-15)
    assert payload["verdict"] == "pass"
    assert payload["config"]["command"] == "bounds"


def test_bounds_without_certificate_exits_1(tmp_path, capsys):
    config = {
        "command": "bounds",
        "solution": {"family": "dilation", "n": 3, "a": [1.0], "b": [1.0, 1.0], "k": 1.0, "k1": 1.0},
        "points": 20,
    }
    path = tmp_path / "bounds.json"
    path.write_text(json.dumps(config))
    assert main(["bounds", "--config", str(path)]) == 1
    assert _last_error(capsys.readouterr())["error"] == "NonPositiveLowerBoundError"


def test_command_helpers(config_path, tmp_path):
    assert cmd_reduce(config_path("quadric_translation.json"), points=20, out=str(tmp_path / "r.json")) == 0
    assert cmd_separability(config_path("separability_cubic.json"), out=str(tmp_path / "s.json")) == 1
    assert cmd_bounds(config_path("bounds_dilation.json"), points=50, out=str(tmp_path / "b.json")) == 0
    assert json.loads((tmp_path / "s.json").read_text())["verdict"] == "non-separable"

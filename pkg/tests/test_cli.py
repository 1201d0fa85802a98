import json

import pytest
from click.testing import CliRunner

from app.main import cli


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def ea_file(runner, tmp_path):
    path = tmp_path / "ea.json"
    result = runner.invoke(cli, ["gen", "ea", "--preset", "ea(2)", "--upto", "20", "--out", str(path)])
    assert result.exit_code == 0, result.output
    return path


def _report(path):
    return json.loads(path.read_text(encoding="utf-8"))


def test_gen_writes_config_header(ea_file):
    data = _report(ea_file)
    assert data["kind"] == "ea"
    assert data["config"]["presets"] == ["ea(2)"]
    assert len(data["terms"]) == 20


def test_verify_identities(runner, ea_file, tmp_path):
    out = tmp_path / "report.json"
    result = runner.invoke(cli, ["verify", "identities", "--seq", str(ea_file), "--out", str(out)])
    assert result.exit_code == 0, result.output
    report = _report(out)
    assert report["command"] == "verify identities"
    assert report["passed"] is True


def test_verify_catches_corrupted_file(runner, ea_file):
    data = _report(ea_file)
    y = data["terms"][9]["y"]
    y[0] = str(int(y[0]) + 1)
    ea_file.write_text(json.dumps(data), encoding="utf-8")
    result = runner.invoke(cli, ["verify", "identities", "--seq", str(ea_file)])
    assert result.exit_code == 1
    assert "recurrence" in result.output


def test_verify_fibonacci_file(runner, tmp_path):
    path = tmp_path / "fib.json"
    gen = runner.invoke(cli, ["gen", "fib", "--preset", "real_example(2,1,2)", "--upto", "20", "--out", str(path)])
    assert gen.exit_code == 0, gen.output
    for check in ("identities", "mod-a", "growth"):
        result = runner.invoke(cli, ["verify", check, "--seq", str(path)])
        assert result.exit_code == 0, result.output


def test_growth_needs_fibonacci(runner, ea_file):
    result = runner.invoke(cli, ["verify", "growth", "--seq", str(ea_file)])
    assert result.exit_code == 3
    assert "PreconditionViolated" in result.output


def test_unknown_preset(runner, tmp_path):
    result = runner.invoke(cli, ["gen", "ea", "--preset", "eb(2)", "--upto", "5", "--out", str(tmp_path / "x.json")])
    assert result.exit_code == 3
    assert "PresetNotFound" in result.output


def test_index_cap_from_config_file(runner, tmp_path):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"index_cap": 10}), encoding="utf-8")
    result = runner.invoke(cli, ["--config", str(config), "gen", "ea", "--preset", "ea(2)", "--upto", "20"])
    assert result.exit_code == 3
    assert runner.invoke(cli, ["gen", "ea", "--preset", "ea(2)", "--upto", "40"]).exit_code == 3


@pytest.mark.parametrize("args", [
    ["gen", "xyz", "--preset", "ea(2)", "--upto", "5"],
    ["--bits", "8", "thresholds", "--which", "real"],
    ["thresholds", "--which", "complex"],
])
def test_usage_errors(runner, args):
    assert runner.invoke(cli, args).exit_code == 2


def test_frac_and_bad_poly(runner, ea_file, tmp_path):
    out = tmp_path / "frac.json"
    result = runner.invoke(cli, ["frac", "--seq", str(ea_file), "--poly", "1,0,0,0", "--range", "3..10", "--out", str(out)])
    assert result.exit_code == 0, result.output
    rows = _report(out)["result"]["rows"]
    assert [r["k"] for r in rows] == [str(k) for k in range(3, 11)]
    bad = runner.invoke(cli, ["frac", "--seq", str(ea_file), "--poly", "1,x"])
    assert bad.exit_code == 3


def test_cf_rational(runner, tmp_path):
    out = tmp_path / "cf.json"
    result = runner.invoke(cli, ["cf", "--value-from", "415/93", "--count", "10", "--out", str(out)])
    assert result.exit_code == 0, result.output
    assert _report(out)["result"]["expansion"]["quotients"] == ["4", "2", "6", "7"]


def test_minkowski_command(runner, tmp_path):
    system = tmp_path / "system.json"
    system.write_text(json.dumps({
        "n": 2,
        "S": [2],
        "xi": {"inf": "1.41421356237309504880", "2": "1/3"},
        "lambda": {"inf": "1/5", "2": "3/10"},
        "c": "3",
    }), encoding="utf-8")
    out = tmp_path / "mink.json"
    result = runner.invoke(cli, ["minkowski", "--system", str(system), "--X", "100", "--out", str(out)])
    assert result.exit_code == 0, result.output
    row = _report(out)["result"]["rows"][0]
    assert row["case"] == "cone"


def test_thresholds_padic(runner):
    result = runner.invoke(cli, ["thresholds", "--which", "padic", "--tol", "1e-6"])
    assert result.exit_code == 0, result.output
    assert "1.615358" in result.output


def test_verify_w2_is_advisory(runner, ea_file, tmp_path):
    out = tmp_path / "w2.json"
    result = runner.invoke(cli, ["verify", "w2", "--seq", str(ea_file), "--out", str(out)])
    assert result.exit_code == 0, result.output
    report = _report(out)
    assert report["passed"] is None
    assert report["result"]["advisory"] is True


def test_alt0_with_algebraic_distances(runner, ea_file, tmp_path):
    out = tmp_path / "alt0.json"
    result = runner.invoke(cli, [
        "--seed", "5", "alt0", "--seq", str(ea_file), "--poly", "1,0,0,0",
        "--max-height", "6", "--decades", "2", "--samples", "20", "--algebraic", "--out", str(out),
    ])
    assert result.exit_code in (0, 1), result.output
    report = _report(out)
    assert report["config"]["seed"] == 5
    assert report["result"]["algebraic"]["rows"]

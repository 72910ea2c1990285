import csv
import json
import subprocess
import sys

import pytest

from levyharmonic.cli import DEFAULT_SEED, SEED_ENV, dispatch, main
from levyharmonic.polycore import SparsePoly


def ok(argv):
    res = dispatch(argv)
    assert res.code == 0, res.text
    return res.text


def test_gamma_plain():
    assert ok(["gamma", "--n", "3", "--format", "plain"]) == "x1^3 + 3*x1*x2 + x3"
    for route in ("partition", "series"):
        assert ok(["gamma", "--n", "3", "--route", route]) == "x1^3 + 3*x1*x2 + x3"


def test_harmonic_plain_and_latex():
    assert ok(["harmonic", "--model", "brownian", "--n", "2"]) == "x^2 - t"
    assert ok(["harmonic", "--model", "poisson", "--n", "3", "--format", "latex"]) == "x^{3} - 3 x t - t"
    assert ok(["harmonic", "--model", "gamma", "--n", "3", "--route", "gf"]) == ok(
        ["harmonic", "--model", "gamma", "--n", "3"]
    )


def test_ks_and_moments():
    assert ok(["ks", "--n", "2"]) == "1/2*x1^2 - 1/2*x2"
    assert ok(["ks", "--n", "2", "--route", "gamma"]) == "1/2*x1^2 - 1/2*x2"
    assert ok(["moments", "--model", "brownian", "--r", "4"]) == "3*t^2"


@pytest.mark.parametrize("argv", [
    ["gamma", "--n", "12", "--format", "json"],
    ["harmonic", "--model", "cp-lognormal", "--n", "4", "--format", "json"],
    ["ks", "--n", "6", "--format", "json"],
    ["moments", "--model", "gamma", "--r", "5", "--format", "json"],
])
def test_json_round_trip(argv):
    text = ok(argv)
    doc = json.loads(text)
    assert doc["schema_version"] == 1
    assert doc["n" if "n" in doc else "r"] >= 4
    p = SparsePoly.from_json(text)
    plain = ok(argv[:-2])
    names = {int(k): v for k, v in doc["variables"].items()}
    assert p.to_plain(lambda v: names[v]) == plain


def test_usage_errors_exit_2():
    assert dispatch(["harmonic", "--model", "levy", "--n", "2"]).code == 2
    assert dispatch(["gamma", "--n", "17"]).code == 2
    assert dispatch(["--max-order", "4", "gamma", "--n", "5"]).code == 2
    assert dispatch(["gamma"]).code == 2
    assert dispatch(["frobnicate"]).code == 2
    assert dispatch(["harmonic", "--model", "brownian:abc", "--n", "2"]).code == 2
    res = dispatch(["harmonic", "--model", "levy", "--n", "2"])
    assert res.text.startswith("levyharmonic: error:") and "\n" not in res.text


def test_max_order_raises_bound():
    assert dispatch(["--max-order", "20", "gamma", "--n", "18"]).code == 0
    assert dispatch(["gamma", "--n", "18"]).code == 2


def test_truncated_config(tmp_path):
    cfg = tmp_path / "k6.json"
    cfg.write_text(json.dumps({"sigma2": "0", "m": ["1"] * 5}))
    assert dispatch(["harmonic", "--model", str(cfg), "--n", "6"]).code == 0
    res = dispatch(["harmonic", "--model", str(cfg), "--n", "7"])
    assert res.code == 2 and "[6/2]+1" in res.text


def test_config_errors(tmp_path):
    neg = tmp_path / "neg.json"
    neg.write_text('{"sigma2": "-1", "m": ["1"]}')
    missing = tmp_path / "nosigma.json"
    missing.write_text('{"m": ["1"]}')
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    for path in (neg, missing, bad, tmp_path / "absent.json"):
        assert dispatch(["harmonic", "--model", str(path), "--n", "2"]).code == 2


def test_selftest():
    text = ok(["selftest"])
    lines = text.splitlines()
    assert len(lines) == 12 and all(line.startswith("[PASS]") for line in lines)


def test_verify_martingale_json():
    res = dispatch(["verify", "martingale", "--model", "poisson", "--n", "3", "--n-paths", "20000"])
    assert res.code == 0
    doc = json.loads(res.text)
    assert doc["seed"] == DEFAULT_SEED
    assert len(doc["verdicts"]) == 2
    for v in doc["verdicts"]:
        assert {"statistic", "estimate", "std_error", "target", "pass"} <= set(v)
        assert v["pass"] is True


def test_verify_failure_exit_1():
    # a far too tight gate must fail
    res = dispatch(["verify", "orthogonality", "--model", "brownian", "--n", "2", "--m", "2",
                    "--n-paths", "5000", "--confidence", "1e-6"])
    assert res.code == 1
    assert json.loads(res.text)["verdicts"][0]["pass"] is False


def test_verify_usage_errors():
    assert dispatch(["verify", "martingale", "--model", "brownian", "--n", "2",
                     "--s", "1.0", "--t", "0.5"]).code == 2
    assert dispatch(["verify", "orthogonality", "--model", "gamma", "--n", "1", "--m", "2",
                     "--n-paths", "200"]).code == 2
    assert dispatch(["verify", "martingale", "--model", "brownian", "--n", "2",
                     "--n-paths", "10"]).code == 2


def test_seed_env(monkeypatch):
    argv = ["simulate", "--model", "brownian", "--n-paths", "500"]
    monkeypatch.setenv(SEED_ENV, "7")
    a = json.loads(ok(argv))
    assert a["seed"] == 7
    assert json.loads(ok(argv + ["--seed", "7"])) == a
    monkeypatch.delenv(SEED_ENV)
    assert json.loads(ok(argv))["seed"] == DEFAULT_SEED
    monkeypatch.setenv(SEED_ENV, "seven")
    assert dispatch(argv).code == 2


def test_simulate_csv_and_workers(tmp_path):
    out = tmp_path / "paths.csv"
    argv = ["simulate", "--model", "sum:brownian+poisson", "--n-paths", "9000", "--t-grid", "0.5,1.0"]
    one = json.loads(ok(argv + ["--csv", str(out)]))
    four = json.loads(ok(argv + ["--workers", "4"]))
    assert one == four
    assert one["grid"] == [0.5, 1.0]
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["path", "X(0.5)", "X(1)"]
    assert len(rows) == 9001


def test_orthogonality_csv(tmp_path):
    out = tmp_path / "p.csv"
    ok(["verify", "orthogonality", "--model", "poisson", "--n", "1", "--m", "2",
        "--n-paths", "2000", "--csv", str(out)])
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["path", "P1", "P2"] and len(rows) == 2001


def test_output_file(tmp_path, capsys):
    out = tmp_path / "g.txt"
    assert main(["--output", str(out), "gamma", "--n", "2"]) == 0
    assert out.read_text() == "x1^2 + x2\n"
    assert capsys.readouterr().out == ""


def test_main_stderr_on_error(capsys):
    assert main(["harmonic", "--model", "nope", "--n", "2"]) == 2
    captured = capsys.readouterr()
    assert captured.out == "" and "unknown model" in captured.err


def test_martingale_bound_warning_to_stderr(tmp_path, capsys):
    cfg = tmp_path / "k4.json"
    cfg.write_text('{"sigma2": "1", "m": ["1", "1", "1"]}')
    assert main(["harmonic", "--model", str(cfg), "--n", "4"]) == 0
    assert "martingale property guaranteed up to degree 3" in capsys.readouterr().err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "levyharmonic", "gamma", "--n", "2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.strip() == "x1^2 + x2"

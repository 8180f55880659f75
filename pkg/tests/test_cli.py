"""Command-line tests: output structure, determinism across reruns and
thread counts, config-file handling, and exit codes."""

import json
import subprocess
import sys

import pytest

from fnoise.cli import main


def _run(argv):
    return main(list(argv))


def test_gumbel_json_structure(tmp_path):
    out = tmp_path / "g.json"
    rc = _run(["gumbel", "--alpha", "0", "--n", "64", "--reps", "100",
               "--seed", "5", "--out", str(out)])
    assert rc == 0
    payload = json.loads(out.read_text())
    assert payload["config"]["subcommand"] == "gumbel"
    assert payload["config"]["model"] == "alpha=0.0 family=constant c0=1.0 cut=1.0"
    assert payload["config"]["seed"] == 5
    assert payload["config"]["reps"] == 100
    assert "threads" not in payload["config"]
    (rep,) = payload["reports"]
    assert rep["n"] == 64
    assert rep["replicates"] == 100
    assert 0.0 <= rep["ks_distance"] <= 1.0
    assert set(rep["quantiles"]) == {"0.01", "0.05", "0.25", "0.5",
                                     "0.75", "0.95", "0.99"}


def test_gumbel_csv_rows(tmp_path):
    out = tmp_path / "g.csv"
    rc = _run(["gumbel", "--alpha", "0", "--n", "64", "--reps", "100",
               "--seed", "5", "--format", "csv", "--out", str(out)])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# config:")
    assert lines[1] == "n,record,key,value"
    summary = [l for l in lines if ",summary," in l]
    quantile = [l for l in lines if ",quantile," in l]
    assert len(summary) == 5
    assert len(quantile) == 7


def test_gumbel_byte_identical_across_threads(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    base = ["gumbel", "--alpha", "0", "--n", "64", "--reps", "100", "--seed", "9"]
    assert _run(base + ["--threads", "1", "--out", str(a)]) == 0
    assert _run(base + ["--threads", "2", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_rerun_is_byte_identical(tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    args = ["covariance", "--alpha", "0.5", "--n", "64", "--step", "0.25"]
    assert _run(args + ["--out", str(a)]) == 0
    assert _run(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_covariance_csv_closed_form(tmp_path):
    """n = 2, flat weights: rho(t) = (cos(pi t) + cos(2 pi t))/2, so the
    t = 0.5 row must read -0.5 and t = 0 must read 1."""
    out = tmp_path / "c.csv"
    rc = _run(["covariance", "--alpha", "0", "--n", "2", "--out", str(out)])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert any(l.startswith("# n=2 sigma_sq=2.0") for l in lines)
    rows = dict(l.split(",") for l in lines
                if not l.startswith("#") and l and l != "t,rho")
    assert float(rows["0.0"]) == pytest.approx(1.0, abs=1e-12)
    assert float(rows["0.5"]) == pytest.approx(-0.5, abs=1e-12)
    assert float(rows["1.0"]) == pytest.approx(0.0, abs=1e-12)


def test_covariance_json_structure(tmp_path):
    out = tmp_path / "c.json"
    rc = _run(["covariance", "--alpha", "0.5", "--n", "16,32",
               "--format", "json", "--out", str(out)])
    assert rc == 0
    payload = json.loads(out.read_text())
    assert [p["n"] for p in payload["profiles"]] == [16, 32]
    for p in payload["profiles"]:
        assert len(p["t"]) == len(p["rho"])
        assert p["rho"][0] == pytest.approx(1.0, abs=1e-12)


def test_conditions_json_with_degenerate_n(tmp_path):
    """n = 1 cannot host the decay check (T > n/2): its record reports the
    error and fails instead of aborting the other conditions."""
    out = tmp_path / "cond.json"
    rc = _run(["conditions", "--alpha", "0", "--n", "1,4096", "--out", str(out)])
    assert rc == 0
    payload = json.loads(out.read_text())
    records = payload["records"]
    assert len(records) == 6
    by_key = {(r["condition"], r["n"]): r for r in records}
    assert by_key[(2, 1)]["pass"] is False
    assert "error" in by_key[(2, 1)]
    assert by_key[(3, 1)]["sup_value"] == pytest.approx(1.0, abs=1e-12)
    assert by_key[(3, 1)]["pass"] is False
    for cond in (1, 2, 3):
        assert by_key[(cond, 4096)]["pass"] is True


def test_conditions_csv_columns(tmp_path):
    out = tmp_path / "cond.csv"
    rc = _run(["conditions", "--alpha", "0.5", "--n", "256", "--format", "csv",
               "--out", str(out)])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[1] == ("condition,n,alpha,family,sup_value,achieving_t,"
                        "pass,threshold,modification_bound")
    assert len([l for l in lines[2:] if l]) == 3


def test_selftest_passes(capsys):
    rc = _run(["selftest"])
    captured = capsys.readouterr()
    assert rc == 0
    assert "selftest: 6/6 passed" in captured.out
    assert "FAIL" not in captured.out


def test_selftest_inject_fault(capsys):
    rc = _run(["selftest", "--inject-fault"])
    captured = capsys.readouterr()
    assert rc == 1
    assert "FAIL" in captured.out
    assert "selftest: 5/6 passed" in captured.out


def test_alpha_outside_theory_is_usage_error(tmp_path, capsys):
    rc = _run(["gumbel", "--alpha", "1.2", "--n", "64", "--reps", "100"])
    captured = capsys.readouterr()
    assert rc == 2
    assert "alpha < 1" in captured.err


def test_gumbel_requires_enough_replicates(capsys):
    rc = _run(["gumbel", "--alpha", "0", "--n", "64", "--reps", "50"])
    assert rc == 2
    assert "reps" in capsys.readouterr().err


def test_missing_model_is_usage_error(capsys):
    rc = _run(["gumbel", "--n", "64", "--reps", "100"])
    assert rc == 2
    assert "alpha" in capsys.readouterr().err


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# base settings\nalpha=0.5\nn=32\nseed=3 reps=100\n")
    out = tmp_path / "o.json"
    rc = _run(["gumbel", "--config", str(cfg), "--seed", "11", "--out", str(out)])
    assert rc == 0
    payload = json.loads(out.read_text())
    assert payload["config"]["seed"] == 11          # flag wins
    assert payload["config"]["model"].startswith("alpha=0.5")
    assert payload["config"]["n"] == [32]
    assert payload["config"]["reps"] == 100


def test_config_file_rejects_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("alpha=0.5\nturbo=yes\n")
    rc = _run(["gumbel", "--config", str(cfg), "--n", "32", "--reps", "100"])
    assert rc == 2
    assert "turbo" in capsys.readouterr().err


def test_config_file_rejects_duplicate_key(tmp_path, capsys):
    cfg = tmp_path / "dup.cfg"
    cfg.write_text("alpha=0.5\nalpha=0.4\n")
    rc = _run(["gumbel", "--config", str(cfg), "--n", "32", "--reps", "100"])
    assert rc == 2


def test_malformed_flag_exits_two():
    proc = subprocess.run(
        [sys.executable, "-c",
         "from fnoise.cli import main; raise SystemExit(main(['gumbel', '--bogus']))"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 2


def test_stdout_emission(capsys):
    rc = _run(["covariance", "--alpha", "0", "--n", "2"])
    captured = capsys.readouterr()
    assert rc == 0
    assert "t,rho" in captured.out

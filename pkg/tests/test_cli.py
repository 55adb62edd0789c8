"""Command-line driver: flags, report format, exit codes."""

import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from ntgof.cli import dump_report, main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def write_uniform_csv(path, n=200, seed=0):
    rng = np.random.default_rng(seed)
    rows = "\n".join(f"{x:.17g}" for x in rng.random(n))
    path.write_text("x\n" + rows + "\n")
    return str(path)


def write_pairs_csv(path, rows):
    body = "\n".join(f"{a:.17g},{b:.17g}" for a, b in rows)
    path.write_text("x,y\n" + body + "\n")
    return str(path)


# ---------------------------------------------------------------------------
# report format


def test_report_floats_are_full_precision():
    text = dump_report({"b": 0.1, "a": [1, {"z": 2.5}], "s": "hi", "t": True})
    assert text.endswith("\n")
    # keys sorted, floats via repr-faithful %.17g
    assert text == '{"a":[1,{"z":2.5}],"b":0.10000000000000001,"s":"hi","t":true}\n'
    assert json.loads(text)["b"] == 0.1


def test_report_rejects_non_finite():
    with pytest.raises(ValueError):
        dump_report({"x": math.inf})


# ---------------------------------------------------------------------------
# test subcommand


def test_uniform_data_accepted(tmp_path, capsys):
    path = write_uniform_csv(tmp_path / "u.csv", n=300, seed=3)
    code, out, err = run_cli(
        capsys, "test", "--input", path, "--mc-reps", "400", "--seed", "5"
    )
    assert code == 0, err
    report = json.loads(out)
    assert report["command"] == "test"
    assert report["kind"] == "uniformity"
    assert report["n"] == 300
    assert report["decision"] == ("reject" if report["p_value"] <= 0.05 else "accept")
    assert report["decision"] == "accept"
    assert report["budget_dim"] == 4  # floor(300^(1/4))
    assert len(report["series"]) == 4
    ks = [row["k"] for row in report["series"]]
    assert ks == [1, 2, 3, 4]
    for row in report["series"]:
        assert row["penalized"] == pytest.approx(row["t"] - row["pi"], abs=1e-12)


def test_dependent_pairs_rejected(tmp_path, capsys):
    rng = np.random.default_rng(1)
    x = rng.standard_normal(150)
    path = write_pairs_csv(tmp_path / "p.csv", np.column_stack([x, x]))
    code, out, err = run_cli(
        capsys,
        "test", "--kind", "independence", "--input", path, "--mc-reps", "300",
    )
    assert code == 0, err
    report = json.loads(out)
    assert report["decision"] == "reject"
    assert report["p_value"] == pytest.approx(1.0 / 301.0)
    assert report["t_s"] > report["critical_value"]


def test_out_flag_matches_stdout(tmp_path, capsys):
    path = write_uniform_csv(tmp_path / "u.csv", n=100)
    args = ["test", "--input", path, "--mc-reps", "200", "--seed", "1"]
    code, out, _ = run_cli(capsys, *args)
    assert code == 0
    dest = tmp_path / "report.json"
    code2 = main(args + ["--out", str(dest)])
    captured = capsys.readouterr()
    assert code2 == 0
    assert captured.out == ""  # report went to the file
    assert dest.read_text() == out


def test_repeat_runs_are_byte_identical(tmp_path, capsys):
    path = write_uniform_csv(tmp_path / "u.csv", n=150, seed=9)
    args = ["test", "--input", path, "--mc-reps", "200", "--seed", "4"]
    _, out1, _ = run_cli(capsys, *args)
    _, out2, _ = run_cli(capsys, *args)
    assert out1 == out2


def test_explicit_dmax(tmp_path, capsys):
    path = write_uniform_csv(tmp_path / "u.csv", n=400)
    code, out, _ = run_cli(
        capsys, "test", "--input", path, "--dmax", "3", "--mc-reps", "200"
    )
    assert code == 0
    report = json.loads(out)
    assert report["budget_dim"] == 3
    assert len(report["series"]) == 3


def test_penalty_table_flow(tmp_path, capsys):
    data = write_uniform_csv(tmp_path / "u.csv", n=100)
    # d(100) = 3, so the table must cover k = 1..3 at n = 100, for both
    # the observed data and every calibration replication
    lines = ["k,n,pi"] + [f"{k},100,{k * math.log(100)}" for k in (1, 2, 3)]
    table = tmp_path / "pi.csv"
    table.write_text("\n".join(lines) + "\n")
    args = ["test", "--input", data, "--mc-reps", "200", "--seed", "2"]
    code, with_table, _ = run_cli(capsys, *args, "--penalty", f"table:{table}")
    assert code == 0
    # this table reproduces the stock penalty, so only the penalty label
    # may differ from the default run
    code, stock, _ = run_cli(capsys, *args)
    assert code == 0
    a, b = json.loads(with_table), json.loads(stock)
    assert a["penalty"].startswith("table:")
    del a["penalty"], b["penalty"]
    assert a == b


def test_incomplete_penalty_table(tmp_path, capsys):
    data = write_uniform_csv(tmp_path / "u.csv", n=100)
    table = tmp_path / "pi.csv"
    table.write_text("k,n,pi\n1,100,4.6\n")  # missing k = 2, 3
    code, _, err = run_cli(
        capsys, "test", "--input", data, "--penalty", f"table:{table}",
        "--mc-reps", "200",
    )
    assert code == 2
    assert "no entry" in err


# ---------------------------------------------------------------------------
# input errors -> exit 2


def test_missing_file(capsys):
    code, _, err = run_cli(capsys, "test", "--input", "/nonexistent/data.csv")
    assert code == 2
    assert "cannot read" in err


def test_empty_csv(tmp_path, capsys):
    f = tmp_path / "empty.csv"
    f.write_text("")
    code, _, err = run_cli(capsys, "test", "--input", str(f))
    assert code == 2
    assert "empty CSV" in err


def test_header_only_csv(tmp_path, capsys):
    f = tmp_path / "h.csv"
    f.write_text("x\n")
    code, _, err = run_cli(capsys, "test", "--input", str(f))
    assert code == 2
    assert "no data rows" in err


def test_wrong_header(tmp_path, capsys):
    f = tmp_path / "w.csv"
    f.write_text("value\n0.5\n")
    code, _, err = run_cli(capsys, "test", "--input", str(f))
    assert code == 2
    assert "line 1" in err and "header" in err


def test_bad_number_reports_line(tmp_path, capsys):
    f = tmp_path / "bad.csv"
    f.write_text("x\n0.5\nabc\n0.7\n")
    code, _, err = run_cli(capsys, "test", "--input", str(f))
    assert code == 2
    assert "line 3" in err and "abc" in err


def test_data_outside_unit_interval(tmp_path, capsys):
    f = tmp_path / "range.csv"
    f.write_text("x\n0.5\n1.5\n0.7\n")
    code, _, err = run_cli(capsys, "test", "--input", f"{f}", "--mc-reps", "200")
    assert code == 2
    assert "outside" in err


def test_bad_alpha(tmp_path, capsys):
    f = write_uniform_csv(tmp_path / "u.csv")
    code, _, err = run_cli(capsys, "test", "--input", f, "--alpha", "1.5")
    assert code == 2
    assert "alpha" in err


def test_too_few_replications(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text('{"n": 100}')
    code, _, err = run_cli(capsys, "calibrate", "--input", str(cfg), "--mc-reps", "50")
    assert code == 2
    assert "mc-reps" in err


def test_bad_dmax(tmp_path, capsys):
    f = write_uniform_csv(tmp_path / "u.csv")
    code, _, err = run_cli(capsys, "test", "--input", f, "--dmax", "20")
    assert code == 2
    assert "dmax" in err


def test_unknown_kind_is_usage_error(tmp_path, capsys):
    f = write_uniform_csv(tmp_path / "u.csv")
    with pytest.raises(SystemExit) as exc:
        main(["test", "--kind", "bogus", "--input", f])
    assert exc.value.code == 2


def test_numeric_failures_exit_3(tmp_path, capsys, monkeypatch):
    from ntgof.errors import NumericError
    import ntgof.cli as cli_module

    def boom(data, spec):
        raise NumericError("score table evaluation failed")

    monkeypatch.setattr(cli_module, "run_test", boom)
    f = write_uniform_csv(tmp_path / "u.csv")
    code, _, err = run_cli(capsys, "test", "--input", f)
    assert code == 3
    assert "numeric failure" in err


# ---------------------------------------------------------------------------
# calibrate subcommand


def test_calibrate_report(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text('{"n": 150}')
    code, out, err = run_cli(
        capsys, "calibrate", "--input", str(cfg), "--mc-reps", "300", "--seed", "8"
    )
    assert code == 0, err
    report = json.loads(out)
    assert report["command"] == "calibrate"
    assert report["n"] == 150
    assert report["replications"] == 300
    stats = report["statistics"]
    assert len(stats) == 300
    assert stats == sorted(stats)
    assert report["critical_value"] == stats[math.ceil(0.95 * 300) - 1]
    assert sum(report["s_counts"]) == 300


def test_calibrate_requires_n(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text('{"alpha": 0.05}')
    code, _, err = run_cli(capsys, "calibrate", "--input", str(cfg))
    assert code == 2
    assert '"n"' in err


def test_config_must_be_object(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text("[1, 2, 3]")
    code, _, err = run_cli(capsys, "calibrate", "--input", str(cfg))
    assert code == 2
    assert "JSON object" in err


# ---------------------------------------------------------------------------
# power subcommand


def test_power_report(tmp_path, capsys):
    cfg = tmp_path / "p.json"
    cfg.write_text(json.dumps({
        "n_grid": [50, 200],
        "alternative": {"type": "contamination", "coefficients": {"1": 0.3}},
    }))
    code, out, err = run_cli(
        capsys, "power", "--input", str(cfg), "--mc-reps", "200", "--seed", "3"
    )
    assert code == 0, err
    report = json.loads(out)
    assert report["command"] == "power"
    assert [p["n"] for p in report["points"]] == [50, 200]
    assert report["points"][1]["rejection_rate"] >= report["points"][0]["rejection_rate"]


def test_power_noisy_copy_requires_independence(tmp_path, capsys):
    cfg = tmp_path / "p.json"
    cfg.write_text(json.dumps({
        "n_grid": [50],
        "alternative": {"type": "noisy_copy", "noise_sd": 0.5},
    }))
    code, _, err = run_cli(capsys, "power", "--input", str(cfg), "--mc-reps", "200")
    assert code == 2
    assert "independence" in err


def test_power_requires_alternative(tmp_path, capsys):
    cfg = tmp_path / "p.json"
    cfg.write_text('{"n_grid": [100]}')
    code, _, err = run_cli(capsys, "power", "--input", str(cfg))
    assert code == 2
    assert "alternative" in err


# ---------------------------------------------------------------------------
# probe subcommand


def test_probe_tail_rate(tmp_path, capsys):
    cfg = tmp_path / "t.json"
    cfg.write_text(json.dumps({
        "probe": "tail_rate",
        "n_grid": [16, 32, 64],
        "y": 0.5,
        "sigma": 1.0,
    }))
    code, out, err = run_cli(
        capsys, "probe", "--input", str(cfg), "--mc-reps", "4000", "--seed", "0"
    )
    assert code == 0, err
    report = json.loads(out)
    assert report["command"] == "probe"
    assert report["probe"] == "tail_rate"
    assert report["passed"] is True
    tails = [row["tail"] for row in report["rows"]]
    assert all(b <= a / 2 for a, b in zip(tails, tails[1:]))


def test_probe_consistency(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({
        "probe": "consistency",
        "n_grid": [100, 400],
        "alternative": {"type": "contamination", "coefficients": {"1": 0.3}},
        "threshold": 0.8,
    }))
    code, out, err = run_cli(
        capsys, "probe", "--input", str(cfg), "--mc-reps", "200", "--seed", "1"
    )
    assert code == 0, err
    report = json.loads(out)
    assert report["probe"] == "consistency"
    assert report["passed"] is True
    assert [row["n"] for row in report["rows"]] == [100, 400]


def test_probe_requires_known_name(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text('{"probe": "other"}')
    code, _, err = run_cli(capsys, "probe", "--input", str(cfg))
    assert code == 2
    assert "probe" in err


# ---------------------------------------------------------------------------
# module entry point


def test_module_entry_runs(tmp_path):
    path = write_uniform_csv(tmp_path / "u.csv", n=80)
    proc = subprocess.run(
        [sys.executable, "-m", "ntgof", "test", "--input", path, "--mc-reps", "200"],
        capture_output=True,
        text=True,
        env={**os.environ, "NTGOF_THREADS": "1"},
    )
    assert proc.returncode == 0, proc.stderr
    report = json.loads(proc.stdout)
    assert report["command"] == "test"


def test_help_exits_zero():
    proc = subprocess.run(
        [sys.executable, "-m", "ntgof", "--help"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    for sub in ("test", "calibrate", "power", "probe"):
        assert sub in proc.stdout

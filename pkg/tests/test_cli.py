"""Command line behavior: output formats, config handling, exit codes."""

import csv
import io
import json
import math
import warnings

import pytest

from wcrte import DEFAULT_SEED, Exponential, NumericError, critical_values, derive_stream
from wcrte.cli import _Z_95, CRITICAL_FIELDS, GOF_FIELDS, MSE_FIELDS, POWER_FIELDS, main
from wcrte.reference import REPORT_FIELDS

FROZEN_WCRTE_VAR_30 = 1.0922596389064871
FROZEN_WCRE_VAR_30 = 4.914762964472582
FROZEN_WCRTE_LSTAT_30 = 0.6199908809954806
FROZEN_WCRE_LSTAT_30 = 1.2319425953040815


def run_cli(argv, capsys):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # tiny samples warn about variance
        try:
            code = main(argv)
        except SystemExit as exc:
            code = int(exc.code or 0)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.fixture
def five_points(tmp_path):
    path = tmp_path / "five.txt"
    path.write_text("1\n2\n3\n4\n5\n")
    return str(path)


@pytest.fixture
def exp30(tmp_path):
    x = Exponential(1.0).quantile(derive_stream(31, 0).random(30))
    path = tmp_path / "exp30.txt"
    path.write_text("\n".join(repr(float(v)) for v in x) + "\n")
    return str(path)


# --- estimate -----------------------------------------------------------------


def test_estimate_hand_values(five_points, capsys):
    code, out, err = run_cli(
        ["estimate", "--data", five_points, "--estimator", "wcrte:e,alpha=2"], capsys
    )
    assert code == 0
    assert out == "wcrte:empirical,alpha=2  estimate=2.4  n=5\n"
    code, out, _ = run_cli(
        ["estimate", "--data", five_points, "--estimator", "wcrte:v,alpha=2,m=1"], capsys
    )
    assert code == 0
    assert out == "wcrte:vasicek,alpha=2,m=1  estimate=1.96  n=5\n"


def test_estimate_reports_unusable_variance(five_points, capsys):
    code, out, _ = run_cli(
        ["estimate", "--data", five_points, "--estimator", "wcrte:l,alpha=2"], capsys
    )
    assert code == 0
    assert out == (
        "wcrte:lstat,alpha=2  estimate=3.5  n=5"
        "  (variance estimate not positive; no interval)\n"
    )


def test_estimate_auto_window_note(exp30, capsys):
    code, out, _ = run_cli(
        ["estimate", "--data", exp30, "--estimator", "wcrte:v,alpha=2"], capsys
    )
    assert code == 0
    assert "wcrte:vasicek,alpha=2,m=10  estimate=" in out
    assert out.rstrip().endswith("(window chosen automatically)")


def test_estimate_lstat_interval(exp30, capsys):
    code, out, _ = run_cli(
        [
            "estimate",
            "--data",
            exp30,
            "--estimator",
            "wcrte:l,alpha=2",
            "--estimator",
            "wcre:l",
        ],
        capsys,
    )
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 2
    for line, est, var in (
        (lines[0], FROZEN_WCRTE_LSTAT_30, FROZEN_WCRTE_VAR_30),
        (lines[1], FROZEN_WCRE_LSTAT_30, FROZEN_WCRE_VAR_30),
    ):
        se = math.sqrt(var / 30.0)
        lo, hi = est - _Z_95 * se, est + _Z_95 * se
        assert f"estimate={est:.10g}" in line
        assert f"se={se:.6g}" in line
        assert f"ci95=[{lo:.6g}, {hi:.6g}]" in line


def test_estimate_argument_errors(five_points, tmp_path, capsys):
    cases = [
        ["estimate", "--estimator", "wcrte:e,alpha=2"],  # no data
        ["estimate", "--data", five_points, "--data", five_points, "--estimator", "wcre:e"],
        ["estimate", "--data", five_points, "--estimator", "wcrte:e"],  # missing alpha
        ["estimate", "--data", str(tmp_path / "missing.txt"), "--estimator", "wcre:e"],
        ["estimate", "--data", five_points],  # no estimator
    ]
    for argv in cases:
        code, _, err = run_cli(argv, capsys)
        assert code == 2, argv
        assert "error" in err.lower()
    short = tmp_path / "short.txt"
    short.write_text("1.0\n")
    code, _, err = run_cli(
        ["estimate", "--data", str(short), "--estimator", "wcre:e"], capsys
    )
    assert code == 2
    assert "n >= 2" in err


def test_estimate_domain_error_exit_code(exp30, capsys):
    code, _, err = run_cli(
        ["estimate", "--data", exp30, "--estimator", "wcrte:v,alpha=2,m=40"], capsys
    )
    assert code == 3
    assert err.startswith("error:")


def test_numeric_failures_use_exit_code_four(five_points, capsys, monkeypatch):
    def boom(path):
        raise NumericError("synthetic numerical failure")

    monkeypatch.setattr("wcrte.cli.read_sample", boom)
    code, _, err = run_cli(
        ["estimate", "--data", five_points, "--estimator", "wcre:e"], capsys
    )
    assert code == 4
    assert "synthetic numerical failure" in err


def test_unknown_subcommand_exits_two(capsys):
    code, _, _ = run_cli(["frobnicate"], capsys)
    assert code == 2
    code, _, _ = run_cli([], capsys)
    assert code == 2


# --- mse-study -----------------------------------------------------------------


def test_mse_study_csv_schema_and_sweep(capsys):
    code, out, err = run_cli(
        [
            "mse-study",
            "--model",
            "exp:lambda=1",
            "--n",
            "10",
            "--alpha",
            "2",
            "--estimator",
            "vasicek",
            "--m",
            "sweep",
            "--reps",
            "50",
        ],
        capsys,
    )
    assert code == 0
    assert err == ""
    rows = parse_csv(out)
    assert out.splitlines()[0] == ",".join(MSE_FIELDS)
    assert [r["m"] for r in rows] == ["1", "2", "3", "4"]
    for r in rows:
        assert r["model"] == "exp:lambda=1"
        assert r["alpha"] == "2"
        assert r["R"] == "50"
        assert r["seed"] == str(DEFAULT_SEED)
        float(r["bias"]), float(r["mse"])  # numeric columns parse


def test_mse_study_reports_skipped_cells(capsys):
    code, out, err = run_cli(
        [
            "mse-study",
            "--model",
            "pareto1:k=1,delta=1.5",
            "--model",
            "exp:lambda=1",
            "--n",
            "10",
            "--alpha",
            "2",
            "--estimator",
            "empirical",
            "--reps",
            "50",
        ],
        capsys,
    )
    assert code == 0
    assert err.startswith("skipped:")
    assert "pareto1:k=1,delta=1.5" in err
    rows = parse_csv(out)
    assert {r["model"] for r in rows} == {"exp:lambda=1"}


def test_mse_study_json_format(capsys):
    code, out, _ = run_cli(
        [
            "mse-study",
            "--model",
            "uniform:theta=1",
            "--n",
            "10",
            "--alpha",
            "1",
            "--estimator",
            "lstat",
            "--reps",
            "40",
            "--format",
            "json",
        ],
        capsys,
    )
    assert code == 0
    rows = json.loads(out)
    assert len(rows) == 1
    assert rows[0]["alpha"] == "1"  # the WCRE limit keeps the label 1
    assert rows[0]["estimator"] == "lstat"
    assert isinstance(rows[0]["bias"], float)


def test_out_flag_writes_file(tmp_path, capsys):
    target = tmp_path / "rows.csv"
    code, out, err = run_cli(
        [
            "mse-study",
            "--model",
            "exp:lambda=1",
            "--n",
            "10",
            "--alpha",
            "2",
            "--estimator",
            "empirical",
            "--reps",
            "40",
            "--out",
            str(target),
        ],
        capsys,
    )
    assert code == 0
    assert out == ""
    rows = parse_csv(target.read_text())
    assert len(rows) == 1
    assert rows[0]["estimator"] == "empirical"


# --- critical-values -------------------------------------------------------------


def test_critical_values_table_mode_matches_library(capsys):
    code, out, _ = run_cli(
        ["critical-values", "--n", "10", "--alpha", "1,2", "--reps", "1000"], capsys
    )
    assert code == 0
    assert out.splitlines()[0] == ",".join(CRITICAL_FIELDS)
    rows = parse_csv(out)
    assert [r["alpha"] for r in rows] == ["1", "2"]
    for row, order in zip(rows, (None, 2.0)):
        pair = critical_values(10, order, 0.05, 1000, DEFAULT_SEED)
        assert float(row["lower"]) == pair.lower
        assert float(row["upper"]) == pair.upper
        assert row["R"] == "1000"


def test_critical_values_data_mode(exp30, tmp_path, capsys):
    u = derive_stream(9000, 40).random(20)
    path = tmp_path / "unit.txt"
    path.write_text("\n".join(repr(float(v)) for v in u) + "\n")
    code, out, _ = run_cli(
        [
            "critical-values",
            "--data",
            str(path),
            "--test",
            "wcrte:alpha=2",
            "--test",
            "ks",
            "--test",
            "ent",
            "--reps",
            "1000",
        ],
        capsys,
    )
    assert code == 0
    assert out.splitlines()[0] == ",".join(GOF_FIELDS)
    rows = parse_csv(out)
    by_test = {r["test"]: r for r in rows}
    band = by_test["wcrte"]
    assert band["alpha"] == "2"
    assert band["lower"] and band["upper"]
    assert band["reject"] == "0"
    ks = by_test["ks"]
    assert ks["alpha"] == "" and ks["lower"] == "" and ks["upper"]
    ent = by_test["ent"]
    assert ent["m"] == "5"
    assert ent["lower"] and ent["upper"] == ""


def test_critical_values_mode_conflicts(exp30, capsys):
    code, _, err = run_cli(
        ["critical-values", "--n", "10", "--data", exp30, "--reps", "1000"], capsys
    )
    assert code == 2
    assert "not both" in err
    code, _, err = run_cli(["critical-values", "--reps", "1000"], capsys)
    assert code == 2


# --- power -----------------------------------------------------------------------


def test_power_csv(capsys):
    code, out, _ = run_cli(
        [
            "power",
            "--alternative",
            "alt:B,j=2",
            "--n",
            "10",
            "--test",
            "ks",
            "--test",
            "wcrte:alpha=2",
            "--test",
            "ent",
            "--reps",
            "200",
        ],
        capsys,
    )
    assert code == 0
    assert out.splitlines()[0] == ",".join(POWER_FIELDS)
    rows = parse_csv(out)
    assert [r["test"] for r in rows] == ["ks", "wcrte", "ent"]
    for r in rows:
        assert r["alternative"] == "alt:B,j=2"
        assert r["n"] == "10"
        assert 0.0 <= float(r["power"]) <= 1.0
    by_test = {r["test"]: r for r in rows}
    assert by_test["wcrte"]["alpha"] == "2"
    assert by_test["ks"]["alpha"] == ""
    assert by_test["ent"]["m"] == "4"


def test_power_requires_alternative_and_test(capsys):
    code, _, err = run_cli(["power", "--test", "ks", "--reps", "200"], capsys)
    assert code == 2
    assert "alternative" in err
    code, _, err = run_cli(["power", "--alternative", "alt:B,j=2", "--reps", "200"], capsys)
    assert code == 2


# --- verify-tables -----------------------------------------------------------------


def test_verify_tables_critical_group(capsys):
    code, out, _ = run_cli(["verify-tables", "--table", "7", "--reps", "1000"], capsys)
    assert code == 0
    assert out.splitlines()[0] == ",".join(REPORT_FIELDS)
    rows = parse_csv(out)
    assert len(rows) == 140  # 70 published (n, alpha) pairs, lower and upper
    assert {r["metric"] for r in rows} == {"lower", "upper"}
    for r in rows:
        assert float(r["abs_diff"]) >= 0.0


def test_verify_tables_rejects_unknown_ids(capsys):
    code, _, _ = run_cli(["verify-tables", "--table", "1", "--reps", "100"], capsys)
    assert code == 2
    code, _, _ = run_cli(["verify-tables", "--reps", "100"], capsys)
    assert code == 2


# --- config and seed handling ---------------------------------------------------------


def test_config_fills_unset_flags_and_flags_win(tmp_path, capsys):
    config = tmp_path / "study.json"
    config.write_text(
        json.dumps(
            {
                "models": ["exp:lambda=1"],
                "n": [10],
                "alpha": [2],
                "estimators": ["empirical"],
                "replications": 200,
            }
        )
    )
    code, out, _ = run_cli(["mse-study", "--config", str(config)], capsys)
    assert code == 0
    rows = parse_csv(out)
    assert len(rows) == 1
    assert rows[0]["R"] == "200"
    code, out, _ = run_cli(
        ["mse-study", "--config", str(config), "--reps", "300"], capsys
    )
    assert code == 0
    assert parse_csv(out)[0]["R"] == "300"


def test_config_rejects_unknown_keys(tmp_path, capsys):
    config = tmp_path / "bad.json"
    config.write_text(json.dumps({"models": ["exp:lambda=1"], "bogus": 1}))
    code, _, err = run_cli(["mse-study", "--config", str(config)], capsys)
    assert code == 2
    assert "bogus" in err


def test_seed_accepts_hex(capsys):
    argv = [
        "mse-study",
        "--model",
        "exp:lambda=1",
        "--n",
        "10",
        "--alpha",
        "2",
        "--estimator",
        "empirical",
        "--reps",
        "50",
    ]
    _, hex_out, _ = run_cli(argv + ["--seed", "0xff"], capsys)
    _, dec_out, _ = run_cli(argv + ["--seed", "255"], capsys)
    assert hex_out == dec_out
    assert ",255" in hex_out
    code, _, err = run_cli(argv + ["--seed", "banana"], capsys)
    assert code == 2

import csv
import io
import math

import pytest

from gmm_lab import InputError
from gmm_lab.cli import (
    EXIT_IO,
    EXIT_OK,
    EXIT_REGIME,
    EXIT_USAGE,
    PRESETS,
    SIM_COLUMNS,
    TAIL_COLUMNS,
    THEORY_COLUMNS,
    main,
    parse_counts,
    parse_grid,
    parse_nu_list,
)


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as handle:
        return list(csv.DictReader(handle))


def run_stdout(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, list(csv.DictReader(io.StringIO(out)))


# ---------------------------------------------------------------------------
# flag parsing
# ---------------------------------------------------------------------------

def test_parse_grid_ranges():
    assert parse_grid("0:1:0.25") == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert parse_grid("-1:1:0.5") == [-1.0, -0.5, 0.0, 0.5, 1.0]
    assert parse_grid("0.5:0.5:1") == [0.5]


def test_parse_grid_strips_float_dust():
    grid = parse_grid("-0.9:0.9:0.1")
    assert len(grid) == 19
    assert 0.3 in grid
    assert all(abs(v) <= 0.9 for v in grid)


def test_parse_grid_lists():
    assert parse_grid("-0.8,-0.4,0,0.4,0.8") == [-0.8, -0.4, 0.0, 0.4, 0.8]
    assert parse_grid("0.5") == [0.5]


def test_parse_grid_rejects_junk():
    for bad in ("", "1:0:0.5", "0:1:0", "0:1:-1", "a,b", "1:2", "1:2:3:4"):
        with pytest.raises(InputError):
            parse_grid(bad)


def test_parse_counts():
    assert parse_counts("1,10,100") == [1, 10, 100]
    for bad in ("0", "-3", "", "x", "1.5"):
        with pytest.raises(InputError):
            parse_counts(bad)


def test_parse_nu_list():
    assert parse_nu_list("3,2,1,0.5") == [3.0, 2.0, 1.0, 0.5]
    assert parse_nu_list("inf") == [math.inf]
    assert parse_nu_list("5,inf") == [5.0, math.inf]
    for bad in ("", "-1", "0", "nan-ish"):
        with pytest.raises(InputError):
            parse_nu_list(bad)


# ---------------------------------------------------------------------------
# theory subcommand
# ---------------------------------------------------------------------------

def test_theory_table_shape_and_values(capsys):
    code, rows = run_stdout(
        capsys, ["theory", "--rho-grid", "-1:1:0.5", "--sigma", "1", "--nu", "4"]
    )
    assert code == EXIT_OK
    assert len(rows) == 5
    assert list(rows[0]) == list(THEORY_COLUMNS)
    mid = rows[2]
    assert mid["rho"] == "0.0"
    assert float(mid["finf"]) == pytest.approx(0.171573, abs=1e-6)
    assert float(mid["nvar_theory"]) == pytest.approx(0.0993268, abs=1e-6)
    assert mid["log_rate_theory"] == ""


def test_theory_boundary_index_emits_markers(capsys):
    code, rows = run_stdout(capsys, ["theory", "--rho-grid", "0:0:1", "--nu", "2"])
    assert code == EXIT_OK
    row = rows[0]
    assert row["nvar_theory"] == "inf"
    assert float(row["log_rate_theory"]) == pytest.approx(0.0248317, abs=1e-6)
    assert row["var_rho_g_theory"] == "inf"
    assert row["cosine_factor"] == "inf"


def test_theory_general_scale_row(capsys):
    code, rows = run_stdout(
        capsys, ["theory", "--sigma", "2", "--rho-grid", "0:0:1", "--nu", "inf"]
    )
    assert code == EXIT_OK
    row = rows[0]
    assert float(row["finf"]) == pytest.approx(0.14590, abs=1e-5)
    assert float(row["f1"]) == pytest.approx(0.19910, abs=1e-5)
    # inverted-estimator column is undefined away from sigma = 1
    assert row["var_rho_g_theory"] == ""
    assert float(row["cosine_factor"]) == 1.0


def test_theory_rejects_bad_rho(capsys):
    assert main(["theory", "--rho-grid", "0:2:1"]) == EXIT_USAGE


# ---------------------------------------------------------------------------
# simulate subcommand
# ---------------------------------------------------------------------------

def test_simulate_writes_the_fixed_schema(tmp_path, capsys):
    out = tmp_path / "table.csv"
    code = main(
        [
            "simulate", "g1-check",
            "--nu", "3", "--rho-grid", "0,0.5", "--reps", "40",
            "--seed", "9", "--workers", "1", "--out", str(out),
        ]
    )
    assert code == EXIT_OK
    summary = capsys.readouterr().out
    assert "2 rows" in summary and "seed=9" in summary
    rows = read_csv(out)
    assert list(rows[0]) == list(SIM_COLUMNS)
    assert rows[0]["experiment"] == "g1-check"
    assert rows[0]["n"] == "1"
    assert rows[0]["seed"] == "9"
    assert rows[0]["degenerate_count"] == "0"


def test_simulate_uses_lf_line_endings(tmp_path):
    out = tmp_path / "t.csv"
    main(["simulate", "g1-check", "--nu", "3", "--rho-grid", "0", "--reps", "5",
          "--workers", "1", "--out", str(out)])
    raw = out.read_bytes()
    assert b"\r" not in raw
    assert raw.endswith(b"\n")


def test_simulate_infinite_theory_markers_in_csv(tmp_path):
    out = tmp_path / "t.csv"
    main(["simulate", "mean-std", "--nu", "1", "--rho-grid", "0", "--n-list", "1,5",
          "--reps", "8", "--workers", "1", "--out", str(out)])
    rows = read_csv(out)
    assert all(row["nvar_theory"] == "inf" for row in rows)
    assert all(row["var_rho_g_theory"] == "inf" for row in rows)


def test_simulate_same_seed_same_bytes_across_workers(tmp_path):
    argv = ["simulate", "mean-std", "--nu", "2.5", "--rho-grid", "-0.5,0.5",
            "--n-list", "1,200000", "--reps", "12", "--seed", "4"]
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    assert main(argv + ["--workers", "1", "--out", str(a)]) == EXIT_OK
    assert main(argv + ["--workers", "3", "--out", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_simulate_endpoints_dropped_by_default(tmp_path):
    out = tmp_path / "t.csv"
    main(["simulate", "g1-check", "--nu", "3", "--rho-grid", "-1:1:0.5",
          "--reps", "5", "--workers", "1", "--out", str(out)])
    rhos = [row["rho"] for row in read_csv(out)]
    assert rhos == ["-0.5", "0.0", "0.5"]
    main(["simulate", "g1-check", "--nu", "3", "--rho-grid", "-1:1:0.5",
          "--reps", "5", "--workers", "1", "--include-endpoints", "--out", str(out)])
    rhos = [row["rho"] for row in read_csv(out)]
    assert rhos == ["-1.0", "-0.5", "0.0", "0.5", "1.0"]


def test_simulate_multiple_nu_and_sigma_blocks(tmp_path):
    out = tmp_path / "t.csv"
    main(["simulate", "g1-check", "--nu", "3,inf", "--sigma", "1,2",
          "--rho-grid", "0", "--reps", "5", "--workers", "1", "--out", str(out)])
    rows = read_csv(out)
    assert [(r["nu"], r["sigma"]) for r in rows] == [
        ("3.0", "1.0"), ("3.0", "2.0"), ("inf", "1.0"), ("inf", "2.0"),
    ]


def test_simulate_regime_violation_exit_code(tmp_path, capsys):
    out = tmp_path / "t.csv"
    code = main(["simulate", "var-check", "--nu", "2", "--rho-grid", "0",
                 "--reps", "5", "--workers", "1", "--out", str(out)])
    assert code == EXIT_REGIME
    assert "nu > 2" in capsys.readouterr().err
    assert not out.exists()


def test_simulate_usage_errors(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "mean-std"])  # --out is required
    assert exc.value.code == EXIT_USAGE
    capsys.readouterr()
    out = tmp_path / "t.csv"
    code = main(["simulate", "mean-std", "--reps", "0", "--rho-grid", "0",
                 "--workers", "1", "--out", str(out)])
    assert code == EXIT_USAGE


def test_simulate_unwritable_path_is_io_error(tmp_path):
    code = main(["simulate", "g1-check", "--nu", "3", "--rho-grid", "0",
                 "--reps", "5", "--workers", "1",
                 "--out", str(tmp_path / "missing" / "t.csv")])
    assert code == EXIT_IO


def test_preset_must_match_the_experiment(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "mse", "--preset", "fig1-small", "--out", "/tmp/x.csv"])
    assert exc.value.code == EXIT_USAGE


def test_preset_fills_defaults_but_flags_win(tmp_path):
    out = tmp_path / "t.csv"
    code = main(["simulate", "mean-std", "--preset", "fig1-small",
                 "--nu", "3", "--rho-grid", "0", "--n-list", "1,10",
                 "--reps", "6", "--workers", "1", "--out", str(out)])
    assert code == EXIT_OK
    rows = read_csv(out)
    # overrides applied: one rho, two n, reps 6; preset only fills gaps
    assert len(rows) == 2
    assert all(row["reps"] == "6" for row in rows)


def test_presets_cover_all_reported_figures():
    assert set(PRESETS) == {
        "fig1", "fig1-small", "fig2", "fig2-small",
        "fig3", "fig3-small", "fig4", "fig4-small",
    }
    for name, preset in PRESETS.items():
        assert preset["experiment"].value in ("mean-std", "var-check", "mse")
        if name.endswith("-small"):
            assert preset["reps"] == 1000
        else:
            assert preset["reps"] == 10000


def test_workers_env_fallback(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("GMM_LAB_WORKERS", "1")
    out = tmp_path / "t.csv"
    code = main(["simulate", "g1-check", "--nu", "3", "--rho-grid", "0",
                 "--reps", "5", "--out", str(out)])
    assert code == EXIT_OK
    monkeypatch.setenv("GMM_LAB_WORKERS", "zero")
    code = main(["simulate", "g1-check", "--nu", "3", "--rho-grid", "0",
                 "--reps", "5", "--out", str(out)])
    assert code == EXIT_USAGE


# ---------------------------------------------------------------------------
# tail-ratio subcommand
# ---------------------------------------------------------------------------

def test_tail_ratio_rows(capsys):
    code, rows = run_stdout(
        capsys, ["tail-ratio", "--nu", "1", "--t-list", "10,100,1000"]
    )
    assert code == EXIT_OK
    assert list(rows[0]) == list(TAIL_COLUMNS)
    ratios = [float(row["ratio"]) for row in rows]
    assert ratios[0] > ratios[1] > ratios[2]


def test_tail_ratio_orders_by_tail_weight(capsys):
    code, rows = run_stdout(capsys, ["tail-ratio", "--nu", "3,1", "--t-list", "10"])
    assert code == EXIT_OK
    heavy = {row["nu"]: float(row["ratio"]) for row in rows}
    assert heavy["3.0"] < heavy["1.0"]


def test_tail_ratio_rejects_gaussian(capsys):
    assert main(["tail-ratio", "--nu", "inf", "--t-list", "10"]) == EXIT_USAGE
    assert main(["tail-ratio", "--nu", "1", "--t-list", "-3"]) == EXIT_USAGE


def test_unknown_subcommand_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == EXIT_USAGE

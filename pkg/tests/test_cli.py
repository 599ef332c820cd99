"""End-to-end checks of the command-line interface.

Everything runs through a real subprocess so the exit-code protocol and the
stdout/stderr split are tested exactly as a shell user sees them: 0 success,
1 certified-claim violation, 2 bad input.
"""

import csv
import json
import subprocess
import sys

CLASSICAL_PAIR = {
    "rho1": [[0.5, 0.0], [0.0, 0.0]],
    "rho2": [[0.0, 0.0], [0.0, 0.5]],
}

IDENTICAL_PAIR = {
    "rho1": [[0.25, 0.0], [0.0, 0.25]],
    "rho2": [[0.25, 0.0], [0.0, 0.25]],
}

BASIS_KETS = [[1.0, 0.0], [0.0, 1.0]]


def run_cli(*argv):
    return subprocess.run(
        [sys.executable, "-m", "qaccess.cli", *argv],
        capture_output=True,
        text=True,
    )


# ---------------------------------------------------------------------------
# mutual-info
# ---------------------------------------------------------------------------


def test_mutual_info_perfect_correlation_prints_one(tmp_path):
    path = tmp_path / "in.json"
    path.write_text(json.dumps({**CLASSICAL_PAIR, "kets": BASIS_KETS}))
    proc = run_cli("mutual-info", "--input", str(path))
    assert proc.returncode == 0
    assert proc.stdout.strip() == "1.0"


def test_mutual_info_identical_states_prints_zero(tmp_path):
    path = tmp_path / "in.json"
    path.write_text(json.dumps({**IDENTICAL_PAIR, "kets": BASIS_KETS}))
    proc = run_cli("mutual-info", "--input", str(path))
    assert proc.returncode == 0
    assert proc.stdout.strip() == "0.0"


def test_mutual_info_accepts_matrix_outcomes(tmp_path):
    half_identity = [[0.5, 0.0], [0.0, 0.5]]
    path = tmp_path / "in.json"
    path.write_text(
        json.dumps({**IDENTICAL_PAIR, "outcomes": [half_identity, half_identity]})
    )
    proc = run_cli("mutual-info", "--input", str(path))
    assert proc.returncode == 0
    assert proc.stdout.strip() == "0.0"


def test_malformed_json_is_a_usage_error(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{nope")
    proc = run_cli("mutual-info", "--input", str(path))
    assert proc.returncode == 2
    assert "malformed JSON" in proc.stderr
    assert str(path) in proc.stderr


def test_missing_state_field_names_the_field(tmp_path):
    path = tmp_path / "in.json"
    path.write_text(json.dumps({"rho1": [[0.5, 0.0], [0.0, 0.5]], "kets": BASIS_KETS}))
    proc = run_cli("mutual-info", "--input", str(path))
    assert proc.returncode == 2
    assert "rho2" in proc.stderr


# ---------------------------------------------------------------------------
# f-curve
# ---------------------------------------------------------------------------


def test_f_curve_default_parameters_cross_zero_once(tmp_path):
    out = tmp_path / "curve.csv"
    proc = run_cli("f-curve", "--out", str(out))
    assert proc.returncode == 0
    with out.open() as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 2001
    fs = [float(r["f"]) for r in rows]
    signs = [1 if v > 0 else -1 for v in fs if v != 0.0]
    changes = sum(1 for a, b in zip(signs, signs[1:]) if a != b)
    assert changes == 1
    meta = json.loads((tmp_path / "curve.csv.meta.json").read_text())
    assert meta["command"] == "f-curve"
    assert meta["samples"] == 2001


def test_f_curve_equal_mixtures_are_identically_zero():
    proc = run_cli(
        "f-curve",
        "--xi1", "0.0", "--eta1", "1.0",
        "--xi2", "0.0", "--eta2", "1.0",
        "--samples", "11",
    )
    assert proc.returncode == 0
    rows = list(csv.DictReader(proc.stdout.splitlines()))
    assert len(rows) == 11
    for r in rows:
        assert float(r["f"]) == 0.0
        assert float(r["fprime"]) == 0.0


def test_f_curve_decays_at_large_arguments():
    proc = run_cli("f-curve", "--t-min=-1e6", "--t-max", "1e6", "--samples", "5")
    assert proc.returncode == 0
    rows = list(csv.DictReader(proc.stdout.splitlines()))
    assert abs(float(rows[0]["f"])) <= 1e-6
    assert abs(float(rows[-1]["f"])) <= 1e-6


def test_f_curve_rejects_parameters_outside_the_domain():
    # xi^2 = 9 exceeds eta = 5
    proc = run_cli("f-curve", "--xi1", "3.0", "--eta1", "5.0")
    assert proc.returncode == 2
    assert "0 <= xi^2 < eta" in proc.stderr


def test_f_curve_rejects_single_sample():
    proc = run_cli("f-curve", "--samples", "1")
    assert proc.returncode == 2
    assert "--samples" in proc.stderr


def test_plot_requires_an_output_path():
    proc = run_cli("f-curve", "--samples", "11", "--plot")
    assert proc.returncode == 2
    assert "--out" in proc.stderr


def test_plot_renders_figure_next_to_output(tmp_path):
    out = tmp_path / "curve.csv"
    proc = run_cli("f-curve", "--samples", "51", "--out", str(out), "--plot")
    assert proc.returncode == 0
    png = tmp_path / "curve.csv.png"
    assert png.exists()
    assert png.stat().st_size > 0


# ---------------------------------------------------------------------------
# optimize / verify
# ---------------------------------------------------------------------------


def test_optimize_report_embeds_configuration():
    proc = run_cli("optimize", "--seed", "5")
    assert proc.returncode == 0
    rep = json.loads(proc.stdout)
    for key in ("best_vn", "best_trine", "gap_bits", "collapsed", "passed"):
        assert key in rep
    assert rep["config"]["command"] == "optimize"
    assert rep["config"]["seed"] == 5


def test_verify_accepts_explicit_pair(tmp_path):
    path = tmp_path / "pair.json"
    path.write_text(json.dumps(CLASSICAL_PAIR))
    out = tmp_path / "report.json"
    proc = run_cli("verify", "--input", str(path), "--out", str(out))
    assert proc.returncode == 0
    rep = json.loads(out.read_text())
    assert rep["passed"] is True
    assert rep["gap_bits"] <= 1e-6
    assert rep["config"]["command"] == "verify"


def test_verify_sweep_requires_a_seed():
    proc = run_cli("verify", "--samples", "3")
    assert proc.returncode == 2
    assert "--seed" in proc.stderr


def test_verify_sweep_emits_one_row_per_pair(tmp_path):
    out = tmp_path / "sweep.csv"
    proc = run_cli(
        "verify", "--samples", "3", "--seed", "7", "--out", str(out)
    )
    assert proc.returncode == 0
    assert "verified 3/3 pairs" in proc.stderr
    with out.open() as fh:
        reader = csv.DictReader(fh)
        assert reader.fieldnames == ["seed", "gap_bits", "collapsed", "max_residual"]
        rows = list(reader)
    assert [int(r["seed"]) for r in rows] == [7, 8, 9]
    for r in rows:
        assert float(r["gap_bits"]) <= 1e-6
        assert r["collapsed"] == "true"


# ---------------------------------------------------------------------------
# certify
# ---------------------------------------------------------------------------


def test_certify_small_grid_schema_and_summary():
    proc = run_cli("certify", "--grid", "3")
    assert proc.returncode == 0
    lines = proc.stdout.strip().split("\n")
    assert len(lines) == 28
    row = json.loads(lines[0])
    assert list(row) == ["alpha1", "xi_sq", "X", "delta", "root_count", "pass"]
    for line in lines[:-1]:
        assert json.loads(line)["pass"] is True
    summary = json.loads(lines[-1])
    assert list(summary) == [
        "summary", "points", "passed", "sign", "base_root_count", "min_margin",
    ]
    assert summary["points"] == 27
    assert summary["passed"] == 27
    assert summary["sign"] == -1
    assert summary["base_root_count"] == 2
    assert "min margin" in proc.stderr


def test_certify_output_is_deterministic(tmp_path):
    first, second = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    assert run_cli("certify", "--grid", "2", "--out", str(first)).returncode == 0
    assert run_cli("certify", "--grid", "2", "--out", str(second)).returncode == 0
    assert first.read_bytes() == second.read_bytes()
    meta = json.loads((tmp_path / "a.jsonl.meta.json").read_text())
    assert meta["grid"] == "2"


def test_certify_rejects_malformed_grid():
    proc = run_cli("certify", "--grid", "3x3")
    assert proc.returncode == 2
    assert "--grid" in proc.stderr


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------


def test_sweep_counts_stay_at_or_below_two(tmp_path):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    proc = run_cli("sweep", "--seed", "0", "--samples", "20", "--out", str(first))
    assert proc.returncode == 0
    assert "max root count = " in proc.stderr
    with first.open() as fh:
        reader = csv.DictReader(fh)
        assert reader.fieldnames == ["seed", "root_count", "identically_zero"]
        rows = list(reader)
    assert len(rows) == 20
    assert all(int(r["root_count"]) <= 2 for r in rows)
    rerun = run_cli("sweep", "--seed", "0", "--samples", "20", "--out", str(second))
    assert rerun.returncode == 0
    assert first.read_bytes() == second.read_bytes()


def test_sweep_requires_a_seed():
    proc = run_cli("sweep", "--samples", "5")
    assert proc.returncode == 2
    assert "--seed" in proc.stderr

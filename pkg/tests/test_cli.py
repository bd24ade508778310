"""Command-line interface: formats, determinism, exit codes, round trips."""

import json
import subprocess
import sys

import pytest

from mollab.cli import (
    EXIT_NUMERIC,
    EXIT_OK,
    EXIT_USAGE,
    load_table,
    main,
    verify_table,
)
from mollab.kappa import MollifierSpec, equal_weight_R, kappa_general, kappa_special


def _run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out


def _body(text):
    return "\n".join(l for l in text.splitlines() if not l.startswith("#"))


def _kv_line(text):
    """Parse the kappa command's key=value summary line into a dict."""
    line = [l for l in text.splitlines() if l.startswith("theta=")][0]
    return dict(part.split("=", 1) for part in line.split())


# ------------------------------------------------------------- kappa


def test_kappa_summary_matches_library(capsys):
    code, out = _run(capsys, "kappa", "--theta", "0.25")
    assert code == EXIT_OK
    row = _kv_line(out)
    res = kappa_special(0.25)
    assert row["mollifier"] == "linear"
    assert float(row["theta"]) == 0.25
    assert float(row["R"]) == pytest.approx(res.R, rel=1e-14)
    assert float(row["c"]) == pytest.approx(res.c_pqr, rel=1e-12)
    assert float(row["kappa"]) == pytest.approx(res.kappa, abs=1e-12)


def test_kappa_sinh_mollifier(capsys):
    code, out = _run(capsys, "kappa", "--theta", "0.125", "--mollifier", "sinh:0.25")
    assert code == EXIT_OK
    spec = MollifierSpec.sinh_shape(0.25)
    want = kappa_general(0.125, equal_weight_R(0.125, spec), 1.0, spec)
    row = _kv_line(out)
    assert row["mollifier"] == "sinh:0.25"
    assert float(row["kappa"]) == pytest.approx(want.kappa, abs=1e-12)


def test_kappa_general_flags(capsys):
    code, out = _run(capsys, "kappa", "--theta", "0.5", "--R", "2.0", "--beta", "1.3")
    assert code == EXIT_OK
    row = _kv_line(out)
    want = kappa_general(0.5, 2.0, 1.3)
    assert float(row["R"]) == 2.0
    assert float(row["beta"]) == 1.3
    assert float(row["kappa"]) == pytest.approx(want.kappa, abs=1e-12)


def test_kappa_out_file_has_manifest_and_csv(tmp_path, capsys):
    path = tmp_path / "one.csv"
    code, out = _run(capsys, "kappa", "--theta", "0.25", "--out", str(path))
    assert code == EXIT_OK
    assert out.startswith("theta=")  # summary still printed
    text = path.read_text()
    comments = [l for l in text.splitlines() if l.startswith("#")]
    joined = "\n".join(comments)
    for key in ("tool", "command", "rel_tol", "abs_tol", "timestamp", "wall_time_s"):
        assert f"# {key}:" in joined
    assert "# tool: mollab" in joined
    body = _body(text).splitlines()
    assert body[0] == "theta,R,beta,mollifier,c_pqr,kappa"
    assert len(body) == 2


def test_kappa_json_structure(capsys):
    code, out = _run(capsys, "kappa", "--theta", "0.25", "--json")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert set(doc) == {"manifest", "header", "rows"}
    assert doc["header"] == ["theta", "R", "beta", "mollifier", "c_pqr", "kappa"]
    assert len(doc["rows"]) == 1
    assert doc["manifest"]["params"]["theta"] == 0.25
    res = kappa_special(0.25)
    assert float(doc["rows"][0][5]) == pytest.approx(res.kappa, abs=1e-12)


# ------------------------------------------------------------- table


def test_table_deterministic_body(capsys):
    _, first = _run(capsys, "table", "0.25", "0.125", "0.5")
    _, second = _run(capsys, "table", "0.25", "0.125", "0.5")
    assert _body(first) == _body(second)
    # rows come out sorted by theta
    thetas = [float(l.split(",")[0]) for l in _body(first).splitlines()[1:]]
    assert thetas == sorted(thetas)


def test_table_grid_and_lower_bound(capsys):
    code, out = _run(capsys, "table", "--grid", "0.05:0.3:8")
    assert code == EXIT_OK
    rows = _body(out).splitlines()[1:]
    assert len(rows) == 8
    for line in rows:
        theta, kappa = float(line.split(",")[0]), float(line.split(",")[5])
        assert kappa - (2.0 / 3.0) * theta > 0.0


def test_table_grid_usage_errors(capsys):
    code, _ = _run(capsys, "table", "0.25", "--grid", "0.1:0.2:3")
    assert code == EXIT_USAGE
    code, _ = _run(capsys, "table", "--grid", "0.3:0.1:5")
    assert code == EXIT_USAGE
    code, _ = _run(capsys, "table", "--grid", "nonsense")
    assert code == EXIT_USAGE


def test_table_empty_is_header_only(capsys):
    code, out = _run(capsys, "table")
    assert code == EXIT_OK
    assert _body(out).splitlines() == ["theta,R,beta,mollifier,c_pqr,kappa"]


def test_table_parallel_matches_serial(capsys):
    _, serial = _run(capsys, "table", "0.1", "0.2", "0.3", "--jobs", "1")
    _, parallel = _run(capsys, "table", "0.1", "0.2", "0.3", "--jobs", "2")
    assert _body(serial) == _body(parallel)


def test_table_round_trip(tmp_path, capsys):
    path = tmp_path / "rows.csv"
    code, _ = _run(capsys, "table", "0.25", "0.125", "--out", str(path))
    assert code == EXIT_OK
    rows = load_table(str(path))
    assert len(rows) == 2
    assert [r.theta for r in rows] == [0.125, 0.25]
    worst = verify_table(rows)
    assert worst <= 1e-12


def test_table_json_rows_are_dicts(capsys):
    code, out = _run(capsys, "table", "0.25", "--json")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["rows"][0]["theta"] == 0.25
    assert doc["rows"][0]["error"] == ""
    assert doc["manifest"]["params"]["n_failed"] == 0


# ------------------------------------------------------------- solve


def test_solve_profile_boundaries(capsys):
    code, out = _run(capsys, "solve", "--R", "5.0", "--points", "11")
    assert code == EXIT_OK
    lines = _body(out).splitlines()
    assert lines[0] == "t,S,Sprime"
    assert len(lines) == 12
    first = [float(x) for x in lines[1].split(",")]
    last = [float(x) for x in lines[-1].split(",")]
    assert first[0] == 0.0 and first[1] == pytest.approx(0.5, abs=1e-12)
    assert last[0] == pytest.approx(5.0, rel=1e-15)
    assert last[1] == pytest.approx(0.0, abs=1e-9)


def test_solve_degenerate_exponent_is_numeric_error(capsys):
    # c = -0.75 makes the two characteristic exponents differ by an
    # integer, which the series connection formula cannot represent:
    # the CLI reports it as a numeric failure, not a usage error.
    code, _ = _run(capsys, "solve", "--R", "2.0", "--c", "-0.75")
    assert code == EXIT_NUMERIC


def test_solve_rejects_c_at_quarter(capsys):
    code, _ = _run(capsys, "solve", "--R", "2.0", "--c", "0.3")
    assert code == EXIT_USAGE


# ------------------------------------------------------------- limit


def test_limit_scan_decreasing(capsys):
    code, out = _run(capsys, "limit", "--y0", "0.75", "--R-list", "5,10,20")
    assert code == EXIT_OK
    lines = _body(out).splitlines()
    assert lines[0] == "R,Q"
    qs = [float(l.split(",")[1]) for l in lines[1:]]
    assert len(qs) == 3
    assert qs == sorted(qs, reverse=True)


def test_limit_validation(capsys):
    assert _run(capsys, "limit", "--y0", "0.4")[0] == EXIT_USAGE
    assert _run(capsys, "limit", "--y0", "0.75", "--R-list", "10,5")[0] == EXIT_USAGE


# ------------------------------------------------------------- verify


def test_verify_quick_passes(capsys):
    code, out = _run(capsys, "verify", "--level", "quick")
    assert code == EXIT_OK
    assert "PASS" in out
    assert "FAIL" not in out


def test_verify_bad_level_rejected_by_parser(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["verify", "--level", "bogus"])
    assert excinfo.value.code == EXIT_USAGE


# ----------------------------------------------------------- tolerances


def test_tol_env_override(capsys, monkeypatch):
    monkeypatch.setenv("MOLLAB_TOL", "1e-09")
    _, out = _run(capsys, "table", "0.25")
    assert "# rel_tol: 1e-09" in out
    # explicit flag beats the environment
    _, out = _run(capsys, "table", "0.25", "--tol", "1e-08")
    assert "# rel_tol: 1e-08" in out


def test_tol_env_invalid(capsys, monkeypatch):
    monkeypatch.setenv("MOLLAB_TOL", "not-a-number")
    assert _run(capsys, "kappa", "--theta", "0.25")[0] == EXIT_USAGE


def test_usage_errors(capsys):
    assert _run(capsys, "kappa", "--theta", "-0.5")[0] == EXIT_USAGE
    assert _run(capsys, "kappa", "--theta", "0.25", "--R", "-1.0")[0] == EXIT_USAGE
    with pytest.raises(SystemExit) as excinfo:
        main(["kappa"])  # --theta is required
    assert excinfo.value.code == EXIT_USAGE


# ---------------------------------------------------------- entry point


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "mollab", "--version"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "mollab 0.1.0" in proc.stdout

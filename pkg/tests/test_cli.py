import csv
import json
import math
from pathlib import Path

import pytest

import pointer_shift
from pointer_shift.cli.config import tomllib
from pointer_shift.cli.main import EXIT_CONFIG, EXIT_INVARIANT, EXIT_NUMERIC, EXIT_OK, main
from pointer_shift.cli.writers import RATIO_COLUMN, SHIFT_HEADER
from pointer_shift.utils.context_manager import get_context_snapshot


def _read_rows(path):
    with path.open(encoding="utf-8", newline="") as fh:
        return list(csv.reader(fh))


# ============================================================================
# shift-scan
# ============================================================================
def test_shift_scan_writes_header_and_rows(tmp_path):
    out = tmp_path / "scan.csv"
    code = main(["shift-scan", "--preset", "fig1a", "--gammas", "0.5", "1", "--thetas", "0.3", "0.6", "-o", str(out)])
    assert code == EXIT_OK
    rows = _read_rows(out)
    assert rows[0] == SHIFT_HEADER
    assert [(float(r[0]), float(r[1])) for r in rows[1:]] == [(0.5, 0.3), (0.5, 0.6), (1.0, 0.3), (1.0, 0.6)]
    assert all(math.isfinite(float(v)) for r in rows[1:] for v in r)


def test_shift_scan_is_byte_identical_across_runs(tmp_path):
    argv = ["shift-scan", "--preset", "fig1b", "--gammas", "0.1", "2", "5", "--thetas", "0.2", "0.7", "1.3"]
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main([*argv, "-o", str(first)]) == EXIT_OK
    assert main([*argv, "-o", str(second)]) == EXIT_OK
    assert first.read_bytes() == second.read_bytes()


def test_shift_scan_zero_coupling_row(tmp_path):
    out = tmp_path / "zero.csv"
    assert main(["shift-scan", "--gammas", "0", "--thetas", "0.3", "--with-ratio", "-o", str(out)]) == EXIT_OK
    header, row = _read_rows(out)
    assert header == SHIFT_HEADER + [RATIO_COLUMN]
    assert abs(float(row[2])) < 1e-12
    assert abs(float(row[3])) < 1e-12
    assert row[-1] == "nan"


def test_shift_scan_failed_point(tmp_path, capsys):
    out = tmp_path / "fail.csv"
    argv = ["shift-scan", "--gammas", "0", "--thetas", "0", "-o", str(out)]
    assert main(argv) == EXIT_OK
    assert "NaN rows written" in capsys.readouterr().err
    assert _read_rows(out)[1][2] == "nan"
    assert main([*argv, "--strict"]) == EXIT_NUMERIC


def test_shift_scan_config_error(tmp_path, capsys):
    code = main(["shift-scan", "--set", "coupling.sigma=-1", "-o", str(tmp_path / "x.csv")])
    assert code == EXIT_CONFIG
    assert "config error" in capsys.readouterr().err
    assert not (tmp_path / "x.csv").exists()


def test_shift_scan_gnuplot_hint(tmp_path, capsys):
    out = tmp_path / "hint.csv"
    assert main(["shift-scan", "--gammas", "1", "--thetas", "0.5", "--gnuplot-hint", "-o", str(out)]) == EXIT_OK
    assert str(out) in capsys.readouterr().out


# ============================================================================
# qfunc
# ============================================================================
@pytest.mark.parametrize("extra", [[], ["--closed-form"]])
def test_qfunc_writes_csv_and_json(tmp_path, extra):
    stem = tmp_path / "q"
    assert main(["qfunc", "--preset", "fig3c", "--grid-count", "21", "-o", str(stem), *extra]) == EXIT_OK
    rows = _read_rows(tmp_path / "q.csv")
    assert rows[0] == ["alpha_r", "alpha_i", "q"]
    assert len(rows) == 1 + 21 * 21
    payload = json.loads((tmp_path / "q.json").read_text(encoding="utf-8"))
    assert len(payload["values"]) == 21 and len(payload["values"][0]) == 21
    assert payload["metadata"]["gamma"] == 1.0
    assert payload["metadata"]["mode"] == ("closed-form" if extra else "oracle")
    assert all(v >= -1e-15 for row in payload["values"] for v in row)


def test_qfunc_output_suffix_is_stripped(tmp_path):
    assert main(["qfunc", "--preset", "fig3a", "--grid-count", "5", "-o", str(tmp_path / "peak.csv")]) == EXIT_OK
    assert (tmp_path / "peak.csv").exists() and (tmp_path / "peak.json").exists()


def test_qfunc_closed_form_needs_coherent_pointer(tmp_path):
    argv = ["qfunc", "--preset", "fig3b", "--set", "pointer.family=spac", "--closed-form", "-o", str(tmp_path / "q")]
    assert main(argv) == EXIT_CONFIG


def test_qfunc_vanishing_postselection(tmp_path):
    argv = ["qfunc", "--gamma", "0", "--theta", "0", "--grid-count", "5", "-o", str(tmp_path / "q")]
    assert main(argv) == EXIT_NUMERIC


# ============================================================================
# limits / verify
# ============================================================================
def test_limits_output(capsys):
    assert main(["limits", "--preset", "fig1a", "--gamma", "2", "--theta", "0.4"]) == EXIT_OK
    values = dict(line.split("=", 1) for line in capsys.readouterr().out.strip().splitlines())
    assert float(values["g"]) == 2.0
    assert float(values["delta_x_strong"]) == pytest.approx(-2.0 * math.sin(0.8))
    assert float(values["delta_x_weak"]) == pytest.approx(-2.0 / math.tan(0.4))
    assert float(values["delta_p_strong"]) == 0.0
    assert "delta_x_coherent" in values


def test_verify_passes(capsys):
    assert main(["verify", "--trials", "3"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "oracle-equivalence" in out and "FAIL" not in out


def test_verify_detects_perturbation(capsys):
    assert main(["verify", "--trials", "3", "--perturb", "1e-3"]) == EXIT_INVARIANT
    assert "oracle-equivalence" in capsys.readouterr().err
    assert get_context_snapshot()["displacement_perturbation"] == 0.0


def test_verify_qubit_note(capsys):
    argv = ["verify", "--trials", "1", "--scenario", "qubit-sigma-x", "--theta", str(math.pi / 4)]
    assert main(argv) == EXIT_OK
    assert "agreement" in capsys.readouterr().out.splitlines()[0]


def test_empty_gamma_list_is_config_error(capsys):
    assert main(["limits", "--set", "sweep.gammas=[]"]) == EXIT_CONFIG
    assert "config error" in capsys.readouterr().err


def test_package_version_matches_manifest():
    root = Path(__file__).resolve().parents[1]
    with (root / "pyproject.toml").open("rb") as fh:
        manifest = tomllib.load(fh)
    assert manifest["project"]["version"] == pointer_shift.__version__
    assert not any(dep.startswith("typing-extensions") for dep in manifest["project"]["dependencies"])

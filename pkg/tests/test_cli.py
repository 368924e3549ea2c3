import json
import subprocess
import sys

import numpy as np
import pytest

import polarkit as pk
from polarkit.cli import main


@pytest.fixture()
def shift_file(tmp_path, shift4):
    path = tmp_path / "shift4.json"
    pk.write_matrix(str(path), shift4)
    return str(path)


@pytest.fixture()
def jordan_file(tmp_path):
    path = tmp_path / "jordan3.json"
    pk.write_matrix(str(path), pk.build(pk.jordan_block(3)))
    return str(path)


Q_MODEL = '{"kind": "q_oscillator", "dim": 6, "q": 0.5, "h": 1.0}'


def test_polar_decompose_text(shift_file, capsys):
    assert main(["polar-decompose", "--in", shift_file]) == 0
    out = capsys.readouterr().out
    assert "polar decomposition verified" in out
    assert "[PASS] triple_product" in out


def test_polar_decompose_json(shift_file, capsys):
    assert main(["polar-decompose", "--in", shift_file, "--report", "json"]) == 0
    obj = json.loads(capsys.readouterr().out)
    assert obj["pass"] is True
    assert obj["rank"] == 3
    pos = pk.matrix_from_json(obj["pos"])
    assert np.allclose(np.diag(pos).real, [1.0, np.sqrt(2.0), np.sqrt(3.0), 0.0])


def test_verify_relation_exit_codes(shift_file, jordan_file, capsys):
    assert main(["verify-relation", "--in", shift_file]) == 0
    assert main(["verify-relation", "--in", jordan_file]) == 1
    out = capsys.readouterr().out
    assert "NO" in out


def test_verify_theorems_inline_model(capsys):
    assert main(["verify-theorems", "--model", Q_MODEL]) == 0
    out = capsys.readouterr().out
    assert "all structure checks passed" in out


def test_tower_reports_dimensions(shift_file, capsys):
    assert main(["tower", "--in", shift_file]) == 0
    out = capsys.readouterr().out
    assert "double closure dimension 4" in out


def test_norm_estimate_unit_shift(capsys):
    code = main(
        [
            "norm-estimate",
            "--model",
            '{"kind": "weighted_shift", "weights": [1.0, 1.0, 1.0]}',
            "--kmax",
            "64",
            "--report",
            "json",
        ]
    )
    assert code == 0
    obj = json.loads(capsys.readouterr().out)
    assert obj["relative_gap"] <= 0.05
    assert obj["dense_norm"] == pytest.approx(2.0 * np.cos(np.pi / 5.0))


def test_normal_order_output(capsys):
    assert main(["normal-order", "a a a*", "--q", "0.5", "--h", "1"]) == 0
    out = capsys.readouterr().out
    assert "l=0 m=1" in out
    assert "[1.5, 0.25]" in out


def test_normal_order_exact_fractions(capsys):
    assert main(["normal-order", "a a a*", "--q", "1/2", "--h", "1", "--exact"]) == 0
    assert "[1.5, 0.25]" in capsys.readouterr().out


def test_normal_order_bad_word(capsys):
    assert main(["normal-order", "a b", "--q", "1", "--h", "1"]) == 2


def test_algebra_info(shift_file, capsys):
    assert main(["algebra-info", "--in", shift_file]) == 0
    out = capsys.readouterr().out
    assert "full algebra C*(1,|a|,U) dimension 16" in out
    assert "graded bandwidth 3" in out


def test_missing_input_is_config_error(capsys):
    assert main(["verify-relation"]) == 2
    assert main(["verify-relation", "--in", "/nonexistent/x.json"]) == 2


def test_out_flag_writes_json(shift_file, tmp_path, capsys):
    out_file = tmp_path / "report.json"
    assert main(["verify-relation", "--in", shift_file, "--out", str(out_file)]) == 0
    obj = json.loads(out_file.read_text())
    assert obj["holds"] is True


def test_run_suite_exit_and_determinism(tmp_path, capsys):
    config = {
        "models": [
            {"kind": "weighted_shift", "weights": [1.0, 1.4142135623730951]},
            {"kind": "q_oscillator", "dim": 4, "q": 0.5, "h": 1.0},
        ],
        "suites": ["polar", "graded", "words"],
        "seed": 7,
    }
    cfg = tmp_path / "config.json"
    cfg.write_text(json.dumps(config))
    out1 = tmp_path / "r1.json"
    out2 = tmp_path / "r2.json"
    assert main(["run-suite", "--config", str(cfg), "--out", str(out1)]) == 0
    assert main(["run-suite", "--config", str(cfg), "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    text = capsys.readouterr().out
    assert "all checks passed" in text


def test_run_suite_negative_control_exit_one(tmp_path, capsys):
    config = {
        "models": [{"kind": "jordan_block", "dim": 3}],
        "suites": ["theorem22"],
        "seed": 0,
    }
    cfg = tmp_path / "config.json"
    cfg.write_text(json.dumps(config))
    out = tmp_path / "report.json"
    assert main(["run-suite", "--config", str(cfg), "--out", str(out)]) == 1
    # the report is still written on failure
    assert json.loads(out.read_text())["all_pass"] is False


def test_run_suite_bad_config_exit_two(tmp_path, capsys):
    cfg = tmp_path / "config.json"
    cfg.write_text(json.dumps({"models": [], "suites": ["polar"]}))
    assert main(["run-suite", "--config", str(cfg)]) == 2


def test_tol_env_override(shift_file, monkeypatch, capsys):
    monkeypatch.setenv("POLARKIT_TOL", "not-a-number")
    assert main(["verify-relation", "--in", shift_file]) == 2
    monkeypatch.setenv("POLARKIT_TOL", "1e-6")
    assert main(["verify-relation", "--in", shift_file]) == 0


def test_console_script_entry_point(shift_file):
    proc = subprocess.run(
        [sys.executable, "-m", "polarkit.cli", "verify-relation", "--in", shift_file],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "yes" in proc.stdout

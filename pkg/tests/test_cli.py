import csv
import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from foliage.cli import ConfigError, RunConfig, load_any, main

MODELS = Path(__file__).resolve().parent.parent / "models"


def _run(tmp_path, *args):
    return main([*args, "--out", str(tmp_path)])


def test_verify_frame_passes(tmp_path, capsys):
    assert _run(tmp_path, "verify-frame", "--model", "builtin:kt34",
                "--model", str(MODELS / "filiform4.json")) == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["passed"] is True and summary["error"] is None
    with open(tmp_path / "verify_frame.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert rows and all(r["status"] in ("pass", "fail") for r in rows)
    assert "gated checks passed" in capsys.readouterr().out


def test_appendix_failure_exit_one(tmp_path):
    assert _run(tmp_path, "appendix-check", "--model", str(MODELS / "kt_leaf14.json")) == 1


def test_appendix_random_models(tmp_path):
    assert _run(tmp_path, "appendix-check", "--model", "builtin:kt34", "--random", "3") == 0
    assert (tmp_path / "appendix_check_data.csv").exists()


def test_jacobi_violation_names_indices(tmp_path, capsys):
    assert _run(tmp_path, "verify-frame", "--model", str(MODELS / "jacobi_broken.json")) == 2
    err = capsys.readouterr().err
    assert "1, 3, 4" in err
    assert (tmp_path / "summary.json").exists()


@pytest.mark.parametrize("args", [
    ["verify-grid", "--model", "builtin:sine", "--N", "12"],
    ["sweep-eps", "--model", "builtin:sine", "--eps", "0.25", "1"],
    ["sweep-eps", "--model", "builtin:sine", "--eps", "-1"],
    ["verify-frame", "--model", "no/such/file.json"],
    ["verify-frame"],
    ["verify-grid", "--model", "builtin:kt34"],
    ["verify-frame", "--model", "builtin:nothing"],
])
def test_invalid_input_exit_two(tmp_path, args):
    assert _run(tmp_path, *args) == 2


def test_bad_phi_rejected_by_parser(tmp_path):
    with pytest.raises(SystemExit):
        _run(tmp_path, "charclass", "--model", "builtin:flat", "--phi", "wedge3")


def test_flat_lichnerowicz_and_spectrum(tmp_path):
    assert _run(tmp_path, "lichnerowicz", "--model", "builtin:flat", "--N", "8") == 0
    assert _run(tmp_path, "spectrum", "--model", "builtin:flat", "--N", "8") == 0


def test_charclass(tmp_path):
    assert _run(tmp_path, "charclass", "--model", "builtin:flat", "--N", "8", "--phi", "ext1") == 0


def test_runs_are_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main(["appendix-check", "--random", "4", "--seed", "7", "--out", str(d)]) == 0
    for name in ("appendix_check.csv", "appendix_check_data.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"model": ["builtin:abelian"], "N": [8], "seed": 1}))
    assert main(["verify-frame", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    cfg.write_text(json.dumps({"model": ["builtin:abelian"], "bogus": 1}))
    assert main(["verify-frame", "--config", str(cfg), "--out", str(tmp_path)]) == 2


def test_tolerance_override_can_fail_a_run(tmp_path):
    assert _run(tmp_path, "lichnerowicz", "--model", "builtin:sine", "--N", "8", "16",
                "--tol", "ratio=1e-30", "--tol", "residual=1e-30") == 1


def test_run_config_validation():
    with pytest.raises(ConfigError):
        RunConfig("verify-grid", model=["builtin:sine"], N=[256]).validate()
    RunConfig("verify-grid", model=["builtin:sine"], N=[4, 128]).validate()


def test_load_any_torus_and_frame():
    assert hasattr(load_any(str(MODELS / "sine_half.json")), "active_axes")
    assert load_any(str(MODELS / "abelian_t4.json")).n == 4


def test_console_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "foliage.cli", "verify-frame", "--model",
                        "builtin:abelian", "--out", str(tmp_path)],
                       capture_output=True, text=True, env=os.environ.copy())
    assert r.returncode == 0, r.stderr

"""Command-line front end: files, exit codes and determinism."""

from __future__ import annotations

import csv
import hashlib
import json
import math
from pathlib import Path

import numpy as np
import pytest

from fracwear.cli import main

SMALL = """\
[numerics]
n = 60
modes = 20
dt = 0.0078125
t_end = 1
times = 0.1, 0.5, 1
"""


@pytest.fixture()
def small_cfg(tmp_path: Path) -> Path:
    p = tmp_path / "small.ini"
    p.write_text(SMALL, encoding="utf-8")
    return p


def run(args: list[str]) -> int:
    return main([*args, "--quiet"])


def read_csv(path: Path, n_cols: int | None = None) -> tuple[list[str], np.ndarray]:
    with path.open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    body = [r[:n_cols] for r in rows[1:]]
    return rows[0], np.array([[float(v) if v else math.nan for v in r] for r in body])


def error_payload(capsys) -> dict:
    err = capsys.readouterr().err.strip().splitlines()
    return json.loads(err[-1])


# {{{ subcommands


def test_mlf(tmp_path, small_cfg):
    assert run(["mlf", "--config", str(small_cfg), "--out", str(tmp_path / "o")]) == 0
    header, data = read_csv(tmp_path / "o" / "mlf.csv", 4)
    assert header[:4] == ["alpha", "beta", "z", "value"]
    at_zero = data[data[:, 2] == 0.0]
    assert at_zero[0, 3] == 1.0


def test_spectrum_defaults(tmp_path):
    assert run(["spectrum", "--out", str(tmp_path)]) == 0
    header, data = read_csv(tmp_path / "spectrum.csv")
    assert header[:4] == ["n", "lambda_n", "sigma_n", "l_n"]
    assert data.shape[0] == 200  # the zero-mean subspace of 201 nodes
    assert data[0, 2] <= 5.37745
    diag = json.loads((tmp_path / "diagnostics.json").read_text())
    assert diag["sigma_1_within_bound"] and diag["interlacing"] and diag["psd"]


def test_init(tmp_path, small_cfg):
    assert run(["init", "--config", str(small_cfg), "--out", str(tmp_path)]) == 0
    diag = json.loads((tmp_path / "diagnostics.json").read_text())
    assert diag["mass"] == pytest.approx(6.0, rel=1e-8)
    assert diag["square_integrable"]
    _, coeffs = read_csv(tmp_path / "coefficients.csv")
    assert coeffs.shape[0] == 20


def test_init_flat_punch_skips_projection(tmp_path, small_cfg):
    cfg = tmp_path / "flat.ini"
    cfg.write_text(SMALL + "[model]\neta = 0\n[load]\nkind = constant\n[initial]\nkind = flat_punch\n")
    assert run(["init", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
    diag = json.loads((tmp_path / "o" / "diagnostics.json").read_text())
    assert not diag["square_integrable"]
    assert diag["delta0"] == pytest.approx(6.0 * (1.6 + math.log(2.0)), rel=1e-12)
    assert not (tmp_path / "o" / "coefficients.csv").exists()


def test_evolve(tmp_path, small_cfg):
    assert run(["evolve", "--config", str(small_cfg), "--out", str(tmp_path)]) == 0
    header, p = read_csv(tmp_path / "pressure.csv")
    assert header == ["t", "x", "p"]
    assert p.shape == (3 * 60, 3)
    _, w = read_csv(tmp_path / "wear.csv")
    assert np.all(w[:, 2] >= 0)
    header, d = read_csv(tmp_path / "indentation.csv")
    assert header == ["t", "delta_rel"]
    assert np.all(np.diff(d[:, 1]) > 0)
    diag = json.loads((tmp_path / "diagnostics.json").read_text())
    assert diag["max_mass_rel_error"] <= 1e-8


def test_stationary(tmp_path, small_cfg):
    assert run(["stationary", "--config", str(small_cfg), "--out", str(tmp_path)]) == 0
    header, prof = read_csv(tmp_path / "stationary.csv")
    assert header == ["x", "p_inf"]
    fit = json.loads((tmp_path / "decay_fit.json").read_text())
    assert fit["kind"] == "algebraic"
    assert fit["predicted"] == -0.6
    assert fit["stationary_mass"] == pytest.approx(10.0, rel=1e-8)


def test_validate(tmp_path, small_cfg):
    assert run(["validate", "--config", str(small_cfg), "--out", str(tmp_path)]) == 0
    verdict = json.loads((tmp_path / "verdict.json").read_text())
    assert verdict["passed"]
    header, comp = read_csv(tmp_path / "comparison.csv")
    assert header == ["t", "rel_l2_interior"]
    assert np.all(comp[:, 1] <= 0.02)


def test_validate_volterra_table(tmp_path, small_cfg):
    assert run(["validate", "--config", str(small_cfg), "--out", str(tmp_path)]) == 0
    with (tmp_path / "volterra.csv").open() as fh:
        rows = list(csv.DictReader(fh))
    assert [r["solver"] for r in rows] == ["abel_second", "script_e_second", "abel_first", "script_e_first"]
    assert all(float(r["oracle_gap"]) <= 1e-4 and float(r["residual"]) <= 1e-4 for r in rows)


def test_validate_failure_exit_code(tmp_path, capsys):
    cfg = tmp_path / "strict.ini"
    cfg.write_text(SMALL + "[validate]\ntolerance = 1e-9\n")
    assert run(["validate", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 1
    assert error_payload(capsys)["exit_code"] == 1
    assert not json.loads((tmp_path / "o" / "verdict.json").read_text())["passed"]


def test_demo_paper(tmp_path, small_cfg):
    assert run(["demo-paper", "--config", str(small_cfg), "--out", str(tmp_path)]) == 0
    header, hist = read_csv(tmp_path / "alpha_sweep" / "history.csv")
    assert header == ["alpha", "t", "p_x0", "p_x05"]
    assert sorted(set(hist[:, 0])) == [0.6, 1.0, 1.2, 1.8]
    norms = json.loads((tmp_path / "mu_sweep" / "deviation_norms.json").read_text())
    values = [norms[k] for k in ("0", "0.5", "1.2", "3", "6")]
    assert values[0] == 0.0
    assert all(b > a for a, b in zip(values, values[1:]))
    assert json.loads((tmp_path / "diagnostics.json").read_text())["verification_passed"]


def test_sampled_load_file(tmp_path):
    (tmp_path / "load.csv").write_text("t,P\n0,6\n0.5,8\n1,8\n")
    cfg = tmp_path / "s.ini"
    cfg.write_text(SMALL + "[load]\nkind = sampled\nfile = load.csv\n")
    assert run(["evolve", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
    diag = json.loads((tmp_path / "o" / "diagnostics.json").read_text())
    assert diag["max_mass_rel_error"] <= 1e-8


# }}}


# {{{ manifest and determinism


def test_manifest_records_outputs(tmp_path, small_cfg):
    assert run(["evolve", "--config", str(small_cfg), "--out", str(tmp_path)]) == 0
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert man["subcommand"] == "evolve"
    assert len(man["config_hash"]) == 64
    assert man["tolerances"]["mass"] == 1e-8
    assert {"fracwear", "numpy", "scipy", "python"} <= set(man["versions"])
    files = {e["file"]: e["sha256"] for e in man["files"]}
    assert set(files) == {"pressure.csv", "wear.csv", "indentation.csv", "diagnostics.json"}
    for name, digest in files.items():
        assert hashlib.sha256((tmp_path / name).read_bytes()).hexdigest() == digest


def test_outputs_are_byte_identical(tmp_path, small_cfg):
    for d in ("a", "b"):
        assert run(["evolve", "--config", str(small_cfg), "--out", str(tmp_path / d)]) == 0
    for name in ("pressure.csv", "wear.csv", "indentation.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_seventeen_significant_digits(tmp_path):
    assert run(["spectrum", "--out", str(tmp_path)]) == 0
    with (tmp_path / "spectrum.csv").open() as fh:
        next(fh)
        sigma = next(fh).split(",")[2]
    assert float(sigma) == float(f"{float(sigma):.17g}")
    assert len(sigma.replace(".", "").lstrip("0")) >= 15


# }}}


# {{{ usage and configuration errors


def test_missing_subcommand(capsys):
    assert main([]) == 2
    captured = capsys.readouterr()
    assert "usage" in captured.err
    assert json.loads(captured.err.strip().splitlines()[-1])["error"] == "usage"


def test_empty_config(tmp_path, capsys):
    empty = tmp_path / "empty.ini"
    empty.write_text("")
    assert run(["spectrum", "--config", str(empty), "--out", str(tmp_path)]) == 2
    captured = capsys.readouterr()
    assert "usage" in captured.err
    assert json.loads(captured.err.strip().splitlines()[-1])["error"] == "config"


@pytest.mark.parametrize(
    "text",
    [
        "[model]\nalpah = 0.5\n",
        "[modle]\nalpha = 0.5\n",
        "[model]\nalpha = 2\n",
        "[model]\nnu = abc\n",
        "[numerics]\ndt = 0.3\n",
        "[numerics]\ntimes = 5\n",
        "[load]\nkind = sampled\nfile = nowhere.csv\n",
        "[kernel]\nkind = gaussian\n",
    ],
)
def test_config_errors(tmp_path, capsys, text):
    cfg = tmp_path / "bad.ini"
    cfg.write_text(text)
    assert run(["spectrum", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
    assert error_payload(capsys)["exit_code"] == 2


def test_missing_config_file(tmp_path, capsys):
    assert run(["spectrum", "--config", str(tmp_path / "none.ini"), "--out", str(tmp_path)]) == 2


def test_bad_thread_count(tmp_path):
    assert run(["spectrum", "--threads", "0", "--out", str(tmp_path)]) == 2


def test_unknown_subcommand():
    assert main(["teleport"]) == 2


def test_model_violation_exit_code(tmp_path, capsys):
    # eta = 0 with a varying load is outside the supported regime
    cfg = tmp_path / "eta0.ini"
    cfg.write_text(SMALL + "[model]\neta = 0\n")
    assert run(["evolve", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
    assert error_payload(capsys)["error"] == "ModelAssumptionError"


def test_inline_comments_are_stripped(tmp_path):
    cfg = tmp_path / "c.ini"
    cfg.write_text("[model]\nalpha = 0.8   ; memory order\n[numerics]\nn = 60 ; nodes\n")
    assert run(["spectrum", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0


# }}}

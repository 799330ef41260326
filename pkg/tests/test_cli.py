import json

import numpy as np
import pytest

from lfsmkit.cli import build_parser, main, resolve_config



def _manifest(d):
    return json.loads((d / "manifest.json").read_text())


def test_generate_geomagnetic_path(tmp_path):
    out = tmp_path / "g"
    assert main(["generate", "--mu", "1.5152", "--beta", "1.58", "--n", "1048576",
                 "--seed", "42", "--out", str(out)]) == 0
    lines = (out / "path_0000.csv").read_text().splitlines()
    assert lines[0] == "index,time,value" and len(lines) == 2**20 + 1
    m = _manifest(out)
    assert m["config"]["params"]["seed"] == 42 and m["kind"] == "lfsm"
    assert set(m["outputs"]) == {"path_0000.csv", "path_0000.meta.json", "run.cfg"}
    assert {"numpy", "scipy", "python", "lfsmkit"} <= set(m["versions"])
    assert "spawn_key" in m["seed_scheme"]["member_stream"]
    assert (out / "timings.json").exists()


def test_verify_kinetic_heat_equation(tmp_path, capsys):
    out = tmp_path / "k"
    assert main(["verify-kinetic", "--mu", "2", "--H", "0.5", "--t", "1", "--out", str(out)]) == 0
    rep = json.loads((out / "kinetic.json").read_text())["reports"]
    assert rep[0]["max_rel_residual"] < 1e-5
    assert "max_rel_residual" in capsys.readouterr().out


def test_verify_kinetic_refine_levels(tmp_path):
    out = tmp_path / "k"
    assert main(["verify-kinetic", "--mu", "1.5152", "--H", "0.45", "--refine", "2", "--out", str(out)]) == 0
    data = json.loads((out / "kinetic.json").read_text())
    assert len(data["reports"]) == 2 and data["monotone"]
    assert data["reports"][1]["refinement_ratio"] > 2


def test_full_experiment(tmp_path):
    out = tmp_path / "f"
    assert main(["full-experiment", "--mu", "1.5152", "--beta", "1.58", "--ensemble", "32",
                 "--seed", "7", "--out", str(out)]) == 0
    for name in ("bursts.csv", "duration_pdf.csv", "size_pdf.csv", "fits.json",
                 "estimates.json", "experiment.json", "manifest.json", "run.cfg"):
        assert (out / name).exists(), name
    fits = json.loads((out / "fits.json").read_text())
    assert fits["predicted"]["duration_exp"] == pytest.approx(1.55, abs=1e-4)
    assert fits["summary"]["n_series"] == 32
    est = json.loads((out / "estimates.json").read_text())
    assert "skipped" in est["H"]  # 32 paths is below the ensemble minimum


def test_rerun_from_manifest_config_reproduces(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    args = ["bursts", "--mu", "1.5", "--beta", "1.7", "--n", "20000", "--ensemble", "3", "--seed", "5"]
    assert main(args + ["--out", str(a)]) == 0
    assert main(["bursts", "--config", str(a / "run.cfg"), "--out", str(b)]) == 0
    for name in _manifest(a)["outputs"]:
        assert (a / name).read_bytes() == (b / name).read_bytes()
    assert (a / "manifest.json").read_bytes() == (b / "manifest.json").read_bytes()


def test_flags_override_config_file(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("mu = 1.5\nbeta = 1.7\nseed = 3\nensemble = 4\nthreshold = zero\n")
    args = build_parser().parse_args(["bursts", "--config", str(cfg), "--seed", "9", "--H", "0.5"])
    rc = resolve_config(args)
    assert rc.params.seed == 9 and rc.ensemble_size == 4 and rc.threshold == "zero"
    assert rc.params.H == pytest.approx(0.5)


def test_beta_and_h_are_mutually_exclusive():
    with pytest.raises(SystemExit) as info:
        build_parser().parse_args(["generate", "--mu", "1.5", "--beta", "1.6", "--H", "0.5"])
    assert info.value.code != 0


def test_config_file_errors(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("mu = 1.5\nbeta = 1.7\nH = 0.5\n")
    assert main(["generate", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
    cfg.write_text("command = bursts\nmu = 1.5\nbeta = 1.7\n")
    assert main(["generate", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
    cfg.write_text("mu = 1.5\nbeta = 1.7\nwidget = 1\n")
    assert main(["generate", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
    assert "widget" in capsys.readouterr().err


@pytest.mark.parametrize("argv, fragment", [
    (["generate", "--mu", "1.2", "--beta", "2.4"], "0 < H < 1"),
    (["generate", "--mu", "2.5", "--beta", "2.0"], "0 < mu <= 2"),
    (["generate", "--mu", "1.5", "--beta", "3.5"], "1 < beta < 3"),
    (["generate", "--beta", "2.0"], "mu is required"),
    (["generate", "--mu", "1.5"], "beta or H"),
    (["generate", "--mu", "1.5", "--beta", "2", "--ensemble", "0"], "ensemble >= 1"),
    (["bursts", "--mu", "1.5", "--beta", "2", "--threshold", "high"], "threshold"),
])
def test_invalid_parameters_exit_nonzero(tmp_path, capsys, argv, fragment):
    assert main(argv + ["--out", str(tmp_path / "o")]) == 2
    assert fragment in capsys.readouterr().err


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["generate", "--mu", "1.5", "--beta", "2", "--n", "10", "--out", str(blocker / "sub")]) == 1


def test_generate_formats(tmp_path):
    for fmt, name in (("binary", "path_0000.f8"), ("json", "path_0000.json")):
        out = tmp_path / fmt
        assert main(["generate", "--mu", "1.5", "--beta", "1.7", "--n", "100", "--format", fmt,
                     "--out", str(out)]) == 0
        assert (out / name).exists()
    raw = np.fromfile(tmp_path / "binary" / "path_0000.f8", dtype="<f8")
    assert raw.size == 100 and raw[0] == 0.0


def test_json_tables(tmp_path):
    out = tmp_path / "j"
    assert main(["bursts", "--mu", "2", "--beta", "2", "--n", "65536", "--ensemble", "4",
                 "--format", "json", "--out", str(out)]) == 0
    tab = json.loads((out / "bursts.json").read_text())
    assert set(tab) == {"start", "duration", "size"}


def test_bursts_from_input_files(tmp_path):
    gen = tmp_path / "g"
    assert main(["generate", "--mu", "2", "--beta", "2", "--n", "65536", "--ensemble", "2",
                 "--seed", "1", "--out", str(gen)]) == 0
    b1, b2 = tmp_path / "b1", tmp_path / "b2"
    assert main(["bursts", "--mu", "2", "--beta", "2", "--input", str(gen / "path_0000.csv"),
                 str(gen / "path_0001.csv"), "--out", str(b1)]) == 0
    assert main(["bursts", "--mu", "2", "--beta", "2", "--n", "65536", "--ensemble", "2",
                 "--seed", "1", "--out", str(b2)]) == 0
    assert (b1 / "bursts.csv").read_bytes() == (b2 / "bursts.csv").read_bytes()


def test_estimate_with_large_ensemble(tmp_path):
    out = tmp_path / "e"
    assert main(["estimate", "--mu", "1.5152", "--beta", "1.58", "--n", "4096", "--ensemble", "500",
                 "--workers", "4", "--out", str(out)]) == 0
    est = json.loads((out / "estimates.json").read_text())
    assert abs(est["H"]["value"] - 0.45) < 0.05
    assert abs(est["closure_residual"]) < 0.2


def test_determinism_across_workers(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    base = ["full-experiment", "--mu", "1.5152", "--beta", "1.58", "--ensemble", "6",
            "--n", "32768", "--seed", "7"]
    assert main(base + ["--workers", "1", "--out", str(a)]) == 0
    assert main(base + ["--workers", "3", "--out", str(b)]) == 0
    names = sorted(p.name for p in a.iterdir() if p.name != "timings.json")
    assert names == sorted(p.name for p in b.iterdir() if p.name != "timings.json")
    for name in names:
        assert (a / name).read_bytes() == (b / name).read_bytes(), name

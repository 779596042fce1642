"""End-to-end command line checks on small workloads."""

import csv
import json

import pytest

from kaclandau.cli import main


def _read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture
def sim_config(tmp_path):
    p = tmp_path / "run.ini"
    p.write_text("""
[system]
n = 6
[dynamics]
mode = jump
horizon = 0.05
snapshot_interval = 0.025
[kernel]
epsilon = 0.8
[ensemble]
runs = 3
master_seed = 4242
""")
    return p


def test_simulate_writes_all_formats(sim_config, tmp_path, capsys):
    out = tmp_path / "out"
    rc = main(["simulate", "--config", str(sim_config),
               "--output", str(out)])
    assert rc == 0
    assert "wrote 3 runs" in capsys.readouterr().out

    manifest = _read_csv(out / "manifest.csv")
    snaps = sorted(out.glob("*.snap"))
    assert len(manifest) == len(snaps) == 3 * 3  # runs x snapshot times
    assert manifest[0]["file"] == "run0000_snap0000.snap"
    assert float(manifest[0]["time"]) == 0.0

    moments = _read_csv(out / "moments.csv")
    assert len(moments) == 9
    assert set(moments[0]) == {"run", "snapshot", "time", "momentum_x",
                               "momentum_y", "momentum_z", "energy"}

    with open(out / "records.jsonl", encoding="utf-8") as fh:
        records = [json.loads(line) for line in fh]
    assert len(records) == 3  # one per snapshot time
    assert records[0]["time"] == 0.0
    assert records[-1]["energy"] > 0


def test_simulate_deterministic_for_seed(sim_config, tmp_path):
    a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    for out in (a, b):
        assert main(["simulate", "--config", str(sim_config),
                     "--output", str(out), "--quiet"]) == 0
    assert main(["simulate", "--config", str(sim_config), "--output", str(c),
                 "--quiet", "--seed", "1"]) == 0
    for name in sorted(p.name for p in a.glob("*.snap")):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    assert (a / "records.jsonl").read_text() == (b / "records.jsonl").read_text()
    assert (a / "run0000_snap0001.snap").read_bytes() != \
        (c / "run0000_snap0001.snap").read_bytes()


def test_simulate_workers_do_not_change_output(sim_config, tmp_path):
    a, b = tmp_path / "w1", tmp_path / "w2"
    assert main(["simulate", "--config", str(sim_config), "--output", str(a),
                 "--quiet", "--workers", "1"]) == 0
    assert main(["simulate", "--config", str(sim_config), "--output", str(b),
                 "--quiet", "--workers", "2"]) == 0
    for name in sorted(p.name for p in a.glob("*.snap")):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_diagnose_from_snapshots(sim_config, tmp_path, capsys):
    out = tmp_path / "out"
    main(["simulate", "--config", str(sim_config), "--output", str(out),
          "--quiet"])
    rc = main(["diagnose", "--input", str(out)])
    assert rc == 0
    assert "diagnosed 3 snapshot times" in capsys.readouterr().out
    with open(out / "diagnostics.jsonl", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    assert len(lines) == 3
    rec = json.loads(lines[0])
    # 3 runs x 6 particles = 18 pooled samples: too few for entropy
    assert rec["entropy"] is None and rec["maxwell_ks"] is not None
    summary = _read_csv(out / "summary.csv")
    assert [row["snapshot"] for row in summary] == ["0", "1", "2"]
    assert summary[0]["entropy"] == "nan"


def test_diagnose_without_manifest(sim_config, tmp_path):
    out = tmp_path / "out"
    main(["simulate", "--config", str(sim_config), "--output", str(out),
          "--quiet"])
    (out / "manifest.csv").unlink()
    assert main(["diagnose", "--input", str(out), "--quiet"]) == 0


def test_diagnose_empty_directory(tmp_path, capsys):
    assert main(["diagnose", "--input", str(tmp_path)]) == 1
    assert "no snapshots" in capsys.readouterr().err


def test_compare_generators_outputs(tmp_path, capsys):
    out = tmp_path / "cmp"
    rc = main(["compare-generators", "--output", str(out), "--quiet",
               "--scales", "0.8,0.4,0.2,0.1", "--functions",
               "energy,gaussian_bump", "--particles", "4"])
    assert rc == 0
    rows = _read_csv(out / "generator_comparison.csv")
    assert len(rows) == 8  # 2 functions x 4 scales
    assert {row["phi"] for row in rows} == {"energy", "gaussian_bump"}
    bump = [r for r in rows if r["phi"] == "gaussian_bump"]
    errs = [float(r["error"]) for r in bump]
    assert errs[-1] < errs[0]  # finer scales approach the limit


def test_compare_generators_unknown_function(tmp_path, capsys):
    rc = main(["compare-generators", "--output", str(tmp_path),
               "--functions", "curl"])
    assert rc == 1
    assert "unknown test function" in capsys.readouterr().err


def test_delta_sweep_outputs(tmp_path):
    config = tmp_path / "d.ini"
    config.write_text("""
[system]
n = 8
mollifier_scale = 0.05
identity_weight = 0.125
[dynamics]
mode = diffusion
dt = 2e-3
horizon = 0.04
snapshot_interval = 0.01
[ensemble]
runs = 48
master_seed = 99
""")
    out = tmp_path / "sweep"
    rc = main(["delta-sweep", "--config", str(config), "--output", str(out),
               "--quiet", "--deltas", "0.8,0.4,0.2"])
    assert rc == 0
    rows = _read_csv(out / "delta_sweep.csv")
    assert [float(r["delta"]) for r in rows] == [0.8, 0.4, 0.2]
    fit = _read_csv(out / "delta_fit.csv")[0]
    assert float(fit["ci_low"]) <= float(fit["slope"]) <= float(fit["ci_high"])


def test_delta_sweep_rejects_jump_mode(tmp_path, capsys):
    config = tmp_path / "j.ini"
    config.write_text("[dynamics]\nmode = jump\n")
    assert main(["delta-sweep", "--config", str(config),
                 "--output", str(tmp_path)]) == 1
    assert "requires diffusion mode" in capsys.readouterr().err


def test_chaos_scan_outputs(tmp_path):
    config = tmp_path / "c.ini"
    config.write_text("""
[dynamics]
mode = jump
horizon = 0.02
[kernel]
epsilon = 0.9
[ensemble]
runs = 100
master_seed = 5
""")
    out = tmp_path / "chaos"
    rc = main(["chaos-scan", "--config", str(config), "--output", str(out),
               "--quiet", "--sizes", "4,8"])
    assert rc == 0
    rows = _read_csv(out / "chaos_scan.csv")
    assert [int(r["n"]) for r in rows] == [4, 8]
    assert all(float(r["ci_low"]) <= float(r["ci_high"]) for r in rows)


def test_bad_config_exit_code(tmp_path, capsys):
    config = tmp_path / "bad.ini"
    config.write_text("[system]\nalpha = 3\n")
    assert main(["simulate", "--config", str(config)]) == 2
    assert "alpha must be < 2" in capsys.readouterr().err


def test_runtime_error_exit_code(tmp_path, capsys):
    assert main(["diagnose", "--input", str(tmp_path / "nowhere")]) == 1

"""Configuration parsing and binary snapshot persistence."""

import struct

import numpy as np
import pytest

from kaclandau import (
    ConfigError,
    DiffusionConfig,
    InteractionConfig,
    KernelConfig,
    RunConfig,
    SystemState,
    default_config_text,
    load_config,
    parse_config,
    read_snapshot,
    snapshot_bytes,
    state_from_bytes,
    write_snapshot,
)


def test_empty_config_gives_defaults():
    cfg = parse_config("")
    assert cfg == RunConfig()
    assert cfg.n == 256 and cfg.alpha == 1.0 and cfg.mode == "diffusion"
    assert cfg.mollifier_scale is None and cfg.snapshot_interval is None
    assert cfg.formats == ("snapshots", "csv", "jsonl")


def test_default_config_text_parses():
    cfg = parse_config(default_config_text())
    assert cfg.n == 256
    assert cfg.snapshot_interval == 0.02
    assert cfg.initial_params == {"temperature": 1.0}


def test_partial_sections_and_overrides():
    cfg = parse_config("""
[dynamics]
mode = jump
horizon = 2.5
[kernel]
profile = uniform
epsilon = 0.25
""")
    assert cfg.mode == "jump" and cfg.horizon == 2.5
    assert cfg.profile == "uniform" and cfg.epsilon == 0.25
    assert cfg.n == 256  # untouched sections keep defaults


def test_config_builders():
    cfg = parse_config("[system]\nalpha = 0.5\nidentity_weight = 0.125\n"
                       "[dynamics]\ndt = 1e-4\n")
    icfg = cfg.interaction()
    assert isinstance(icfg, InteractionConfig)
    assert icfg.alpha == 0.5 and icfg.identity_weight == 0.125
    dcfg = cfg.diffusion()
    assert isinstance(dcfg, DiffusionConfig) and dcfg.dt == 1e-4
    kcfg = parse_config("[kernel]\nprofile = uniform\n").kernel()
    assert isinstance(kcfg, KernelConfig)
    assert kcfg.profile.kind == "uniform"


def test_alpha_constraint_reported():
    with pytest.raises(ConfigError, match="alpha must be < 2"):
        parse_config("[system]\nalpha = 3.0\n")


def test_all_violations_collected():
    bad = """
[system]
n = 0
alpha = two
[orbit]
radius = 1
[dynamics]
mode = exact
dt = -1
[initial]
distribution = gaussian
shift = 2.0
"""
    with pytest.raises(ConfigError) as err:
        parse_config(bad)
    v = err.value.violations
    assert "orbit: unknown section" in v
    assert "system.alpha: cannot parse 'two'" in v
    assert "system.n: n must be at least 1" in v
    assert "dynamics.mode: mode must be jump or diffusion" in v
    assert "dynamics.dt: dt must be positive" in v
    assert "initial.shift: not a parameter of gaussian" in v
    assert len(v) == 6  # nothing spurious


def test_unknown_key_reported():
    with pytest.raises(ConfigError, match="system.mass: unknown key"):
        parse_config("[system]\nmass = 1\n")


def test_jump_mode_needs_two_particles():
    with pytest.raises(ConfigError, match="jump dynamics requires n >= 2"):
        parse_config("[system]\nn = 1\n[dynamics]\nmode = jump\n")
    parse_config("[system]\nn = 1\n")  # diffusion mode is fine


def test_initial_distribution_parameters():
    cfg = parse_config("[initial]\ndistribution = anisotropic_gaussian\n"
                       "t1 = 1\nt2 = 2\nt3 = 3\n")
    assert cfg.initial_params == {"t1": 1.0, "t2": 2.0, "t3": 3.0}
    with pytest.raises(ConfigError, match="anisotropic_gaussian needs"):
        parse_config("[initial]\ndistribution = anisotropic_gaussian\n")
    with pytest.raises(ConfigError, match="unknown distribution"):
        parse_config("[initial]\ndistribution = vortex\n")
    # constraint checks run on the actual sampler factory
    with pytest.raises(ConfigError, match="temperature must be positive"):
        parse_config("[initial]\ntemperature = -1\n")


def test_kernel_constraints_surface():
    with pytest.raises(ConfigError, match="kernel"):
        parse_config("[kernel]\nepsilon = 0\n")
    with pytest.raises(ConfigError, match="kernel.profile"):
        parse_config("[kernel]\nprofile = cubic\n")


def test_output_formats():
    cfg = parse_config("[output]\nformats = csv , snapshots\n")
    assert cfg.formats == ("csv", "snapshots")
    with pytest.raises(ConfigError, match="unknown format"):
        parse_config("[output]\nformats = csv,parquet\n")


def test_duplicate_section_names_line():
    with pytest.raises(ConfigError, match="line"):
        parse_config("[system]\nn = 4\n[system]\nn = 8\n")


def test_load_config_reads_file(tmp_path):
    p = tmp_path / "run.ini"
    p.write_text("[ensemble]\nruns = 9\nmaster_seed = 7\n")
    cfg = load_config(p)
    assert cfg.runs == 9 and cfg.master_seed == 7


def test_snapshot_roundtrip_bit_exact(rng, tmp_path):
    state = SystemState(rng.standard_normal((17, 3)), time=0.375)
    path = tmp_path / "a.snap"
    write_snapshot(state, path)
    back = read_snapshot(path)
    assert back.time == state.time
    assert back.n == 17
    assert np.array_equal(back.velocities, state.velocities)
    # byte-level determinism
    assert snapshot_bytes(back) == snapshot_bytes(state)


def test_snapshot_error_paths(rng):
    blob = snapshot_bytes(SystemState(rng.standard_normal((3, 3))))
    with pytest.raises(ValueError, match="unexpected end"):
        state_from_bytes(blob[:10])
    with pytest.raises(ValueError, match="unexpected end"):
        state_from_bytes(blob[:-8])
    with pytest.raises(ValueError, match="bad snapshot magic"):
        state_from_bytes(b"XXXX" + blob[4:])
    future = struct.pack("<4sIQd", b"KLND", 2, 3, 0.0) + blob[24:]
    with pytest.raises(ValueError, match="unsupported snapshot version 2"):
        state_from_bytes(future)


def test_snapshot_reads_ignore_trailing_bytes(rng):
    state = SystemState(rng.standard_normal((2, 3)), time=1.0)
    back = state_from_bytes(snapshot_bytes(state) + b"tail")
    assert np.array_equal(back.velocities, state.velocities)

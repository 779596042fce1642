"""Diffusion dynamics tests: drift oracle, noise covariance, guard."""

import numpy as np
import pytest
from scipy import stats

from kaclandau import (
    DiffusionConfig,
    InteractionConfig,
    SystemState,
    drift,
    interaction_matrix,
    noise_increments,
    run_diffusion,
    step_euler_maruyama,
)

from conftest import central_jacobian


def _dense_divergence(v, cfg):
    """Independent oracle: column divergence of the dense matrix field."""
    n = v.shape[0]

    def assemble(flat):
        return interaction_matrix(SystemState(flat.reshape(n, 3)), cfg)

    jac = central_jacobian(assemble, v.ravel(), h=1e-6)
    # jac[a*3n + l, m] = d B[a, l] / d v_m ; divergence contracts a == m
    size = 3 * n
    J = jac.reshape(size, size, size)
    return np.einsum("ala->l", J).reshape(n, 3)


def test_drift_matches_dense_divergence(rng):
    for alpha in (1.0, 0.5, -2.0):
        cfg = InteractionConfig(alpha=alpha, mollifier_scale=0.15,
                                identity_weight=0.3)
        for _ in range(5):
            v = rng.standard_normal((4, 3))
            b = drift(SystemState(v), cfg)
            oracle = _dense_divergence(v, cfg)
            scale = max(1.0, np.abs(oracle).max())
            assert np.allclose(b, oracle, rtol=1e-6, atol=1e-6 * scale), alpha


def test_drift_two_particle_closed_form():
    d = 1.7
    v = np.array([[d / 2, 0.0, 0.0], [-d / 2, 0.0, 0.0]])
    cfg = InteractionConfig(alpha=1.0, mollifier_scale=0.1)
    b = drift(SystemState(v), cfg)
    assert np.allclose(b[0], [-2.0 / d ** 2, 0.0, 0.0], rtol=1e-14)
    assert np.allclose(b[1], [2.0 / d ** 2, 0.0, 0.0], rtol=1e-14)


def test_drift_zero_inside_mollifier():
    v = 0.01 * np.arange(12, dtype=np.float64).reshape(4, 3)
    cfg = InteractionConfig(alpha=1.0, mollifier_scale=1.0)
    assert np.all(drift(SystemState(v), cfg) == 0.0)


def test_drift_antisymmetric_total(rng):
    v = rng.standard_normal((9, 3))
    b = drift(SystemState(v), InteractionConfig(alpha=1.0,
                                                mollifier_scale=0.05))
    assert np.allclose(b.sum(axis=0), 0.0, atol=1e-13)


def test_noise_covariance_matches_dense_matrix():
    # frozen state, n=4: empirical covariance of 1e5 increments must
    # match twice the assembled matrix times dt within 5 standard errors
    rng = np.random.default_rng(2024)
    v = np.array([[0.9, 0.1, -0.4],
                  [-0.6, 0.8, 0.3],
                  [0.2, -0.7, 0.5],
                  [-0.5, -0.2, -0.4]])
    cfg = InteractionConfig(alpha=1.0, mollifier_scale=0.1,
                            identity_weight=0.25)
    state = SystemState(v)
    dt = 0.01
    m = 100_000
    draws = np.empty((m, 12))
    for idx in range(m):
        draws[idx] = noise_increments(state, cfg, dt, rng).ravel()
    target = 2.0 * dt * interaction_matrix(state, cfg)
    mean_se = np.sqrt(np.diag(target) / m)
    assert np.all(np.abs(draws.mean(axis=0)) <= 5.0 * mean_se)
    emp = (draws.T @ draws) / m
    se = np.sqrt((np.outer(np.diag(target), np.diag(target))
                  + target ** 2) / m)
    assert np.all(np.abs(emp - target) <= 5.0 * se + 1e-12)


def test_noise_conserves_momentum_without_identity(rng):
    v = rng.standard_normal((8, 3))
    cfg = InteractionConfig(alpha=1.0, mollifier_scale=0.05,
                            identity_weight=0.0)
    for _ in range(50):
        inc = noise_increments(SystemState(v), cfg, 0.01, rng)
        assert np.allclose(inc.sum(axis=0), 0.0, atol=1e-12)


def test_step_conserves_momentum_without_identity(rng):
    cfg = DiffusionConfig(dt=1e-3, interaction=InteractionConfig(
        alpha=1.0, mollifier_scale=0.2, identity_weight=0.0))
    state = SystemState(rng.standard_normal((6, 3)))
    mom0 = state.velocities.sum(axis=0)
    for _ in range(200):
        state = step_euler_maruyama(state, cfg, rng)
    assert np.allclose(state.velocities.sum(axis=0), mom0, atol=1e-11)


def test_step_zero_dt_is_identity(rng):
    cfg = DiffusionConfig(dt=1e-3)
    state = SystemState(rng.standard_normal((4, 3)), time=0.5)
    out = step_euler_maruyama(state, cfg, rng, dt=0.0)
    assert np.array_equal(out.velocities, state.velocities)
    assert out.time == state.time


def test_stability_guard_threshold():
    # two particles at distance 0.5, alpha=1, chi_bar=1: coefficient 2,
    # so the guard bound is safety / (n * 2) = 0.25
    v = np.array([[0.25, 0.0, 0.0], [-0.25, 0.0, 0.0]])
    icfg = InteractionConfig(alpha=1.0, mollifier_scale=0.1,
                             identity_weight=0.0)
    rng = np.random.default_rng(0)
    ok = DiffusionConfig(dt=0.24, interaction=icfg)
    step_euler_maruyama(SystemState(v), ok, rng)
    bad = DiffusionConfig(dt=0.26, interaction=icfg)
    with pytest.raises(ValueError, match="stability guard"):
        step_euler_maruyama(SystemState(v), bad, rng)


def test_guard_disabled_allows_large_dt():
    v = np.array([[0.25, 0.0, 0.0], [-0.25, 0.0, 0.0]])
    icfg = InteractionConfig(alpha=1.0, mollifier_scale=0.1,
                             identity_weight=0.0)
    cfg = DiffusionConfig(dt=0.26, interaction=icfg, guard_enabled=False)
    step_euler_maruyama(SystemState(v), cfg, np.random.default_rng(0))


def test_blowup_detected():
    v = np.array([[5e-5, 0.0, 0.0], [-5e-5, 0.0, 0.0]])
    icfg = InteractionConfig(alpha=1.9, mollifier_scale=1e-6,
                             identity_weight=0.0)
    cfg = DiffusionConfig(dt=1e300, interaction=icfg, guard_enabled=False)
    with np.errstate(over="ignore"):
        with pytest.raises(ValueError, match="blow-up"):
            step_euler_maruyama(SystemState(v), cfg, np.random.default_rng(1))


def test_single_particle_is_brownian():
    # n=1: no pairs, only the identity block; increments are iid
    # N(0, 2 kappa dt) per component
    kappa, dt = 0.8, 0.01
    cfg = DiffusionConfig(dt=dt, interaction=InteractionConfig(
        identity_weight=kappa, mollifier_scale=1.0))
    rng = np.random.default_rng(77)
    state = SystemState(np.zeros((1, 3)))
    incs = []
    for _ in range(3000):
        new = step_euler_maruyama(state, cfg, rng)
        incs.append((new.velocities - state.velocities).ravel())
        state = new
    incs = np.concatenate(incs)
    p = stats.kstest(incs, "norm", args=(0.0, np.sqrt(2 * kappa * dt))).pvalue
    assert p > 0.01


def test_energy_growth_rate(rng):
    # generator applied to total energy is exactly 6 kappa n; pair terms
    # cancel since the projector annihilates the pair direction
    n, kappa, dt, steps, runs = 16, 1.0 / 16, 1e-3, 50, 200
    cfg = DiffusionConfig(dt=dt, interaction=InteractionConfig(
        alpha=1.0, mollifier_scale=0.05, identity_weight=kappa))
    gains = np.empty(runs)
    for r in range(runs):
        state = SystemState(rng.standard_normal((n, 3)))
        e0 = float(np.sum(state.velocities ** 2))
        for _ in range(steps):
            state = step_euler_maruyama(state, cfg, rng)
        gains[r] = np.sum(state.velocities ** 2) - e0
    t = dt * steps
    expected = 6.0 * kappa * n * t
    se = gains.std(ddof=1) / np.sqrt(runs)
    assert abs(gains.mean() - expected) < 4.0 * se + 1e-12


def test_run_diffusion_grid_and_determinism():
    cfg = DiffusionConfig(dt=1e-3, interaction=InteractionConfig(
        alpha=1.0, mollifier_scale=0.2))
    sampler = lambda r, n: r.standard_normal((n, 3))
    a = run_diffusion(sampler, 5, cfg, 0.02, np.random.default_rng(9),
                      snapshot_interval=0.005)
    assert np.allclose(a.times, [0.0, 0.005, 0.01, 0.015, 0.02])
    b = run_diffusion(sampler, 5, cfg, 0.02, np.random.default_rng(9),
                      snapshot_interval=0.005)
    assert np.array_equal(a.states, b.states)


def test_run_diffusion_horizon_handling():
    sampler = lambda r, n: r.standard_normal((n, 3))
    cfg = DiffusionConfig(dt=1e-3, steps=7)
    res = run_diffusion(sampler, 3, cfg, None, np.random.default_rng(1))
    assert res.times[-1] == pytest.approx(0.007)
    zero = run_diffusion(sampler, 3, cfg, 0.0, np.random.default_rng(1))
    assert zero.times.shape == (1,) and zero.states.shape == (1, 3, 3)
    with pytest.raises(ValueError, match="horizon"):
        run_diffusion(sampler, 3, DiffusionConfig(dt=1e-3), None,
                      np.random.default_rng(1))


def test_diffusion_config_validation():
    with pytest.raises(ValueError, match="dt must be positive"):
        DiffusionConfig(dt=0.0)
    with pytest.raises(ValueError, match="steps"):
        DiffusionConfig(dt=1e-3, steps=0)
    with pytest.raises(ValueError, match="stability_safety"):
        DiffusionConfig(dt=1e-3, stability_safety=1.5)

"""Generator evaluations: quadrature honesty and the grazing limit."""

import numpy as np
import pytest

from kaclandau import (
    GaussianBump,
    InteractionConfig,
    KernelConfig,
    Polynomial,
    SystemState,
    diffusion_generator_apply,
    drift,
    energy,
    grazing_limit_study,
    interaction_matrix,
    jump_generator_apply,
)
from kaclandau.generators import _jump_value


def _linear(j, slot, axis):
    expo = np.zeros((j, 3), dtype=np.int64)
    expo[slot, axis] = 1
    return Polynomial(j=j, terms=((1.0, expo),))


def test_jump_generator_annihilates_conserved_quantities(rng):
    k = KernelConfig(epsilon=0.5)
    for _ in range(5):
        state = SystemState(rng.standard_normal((4, 3)))
        # total energy and total momentum of the full system
        assert abs(jump_generator_apply(energy(4), state, k)) < 1e-12
        for axis in range(3):
            terms = tuple((1.0, e) for e in
                          [np.eye(1, 12, 3 * s + axis,
                                  dtype=np.int64).reshape(4, 3)
                           for s in range(4)])
            mom = Polynomial(j=4, terms=terms)
            assert abs(jump_generator_apply(mom, state, k)) < 1e-12


def test_jump_generator_tagged_drift_closed_form():
    # n=2, |u|=2: grazing limit of the tagged first-component drift is
    # 2 pi m3 / (n r^2) = 0.5 for the default profile (m3 = 2/pi)
    state = SystemState(np.array([[0.0, 0, 0], [2.0, 0, 0]]))
    phi = _linear(1, 0, 0)
    k = KernelConfig()
    val = jump_generator_apply(phi, state, k, epsilon=0.1, rtol=1e-12)
    assert abs(val - 0.5) < 1e-8


def test_jump_generator_quadrature_settles(rng):
    state = SystemState(rng.standard_normal((3, 3)))
    phi = GaussianBump(rng.standard_normal((2, 3)), scale=1.5)
    k = KernelConfig(epsilon=0.4, quadrature_order=16)
    coarse = _jump_value(phi, state, k, 32)
    fine = _jump_value(phi, state, k, 256)
    assert abs(coarse - fine) < 1e-8
    settled = jump_generator_apply(phi, state, k, rtol=1e-10)
    assert abs(settled - fine) < 1e-8


def test_jump_generator_escalation_error(rng):
    state = SystemState(np.array([[0.4, 0.1, -0.2], [-0.3, 0.5, 0.2],
                                  [0.1, -0.6, 0.3]]))
    phi = GaussianBump(np.zeros((2, 3)), scale=0.3)
    k = KernelConfig(epsilon=0.9, quadrature_order=4)
    with pytest.raises(RuntimeError, match="quadrature escalation exceeded"):
        jump_generator_apply(phi, state, k, rtol=1e-15, max_order=8)


def test_diffusion_generator_matches_dense_contraction(rng):
    # oracle: L phi = b . grad + B : hess with the dense matrix and the
    # already-verified drift, padded over untouched particle slots
    for alpha, kappa in ((1.0, 0.3), (-2.0, 0.0), (0.5, 0.1)):
        cfg = InteractionConfig(alpha=alpha, mollifier_scale=0.1,
                                identity_weight=kappa)
        for _ in range(5):
            n, j = 5, 2
            state = SystemState(rng.standard_normal((n, 3)))
            phi = GaussianBump(rng.standard_normal((j, 3)), scale=1.2)
            g = np.zeros((n, 3))
            g[:j] = phi.grad(state.velocities[:j])
            H = np.zeros((3 * n, 3 * n))
            H[:3 * j, :3 * j] = phi.hess(
                state.velocities[:j]).reshape(3 * j, 3 * j)
            B = interaction_matrix(state, cfg)
            b = drift(state, cfg)
            oracle = float(np.sum(b * g)) + float(np.sum(B * H))
            got = diffusion_generator_apply(phi, state, cfg)
            assert abs(got - oracle) < 1e-11 * max(1.0, abs(oracle))


def test_diffusion_generator_energy_is_identity_block(rng):
    # pair blocks annihilate the energy gradient and trace out against
    # the off-diagonal Hessian, leaving exactly 6 kappa n
    for n, kappa in ((4, 0.25), (7, 0.0), (3, 1.0)):
        cfg = InteractionConfig(alpha=1.0, mollifier_scale=0.05,
                                identity_weight=kappa)
        state = SystemState(rng.standard_normal((n, 3)))
        val = diffusion_generator_apply(energy(n), state, cfg)
        assert abs(val - 6.0 * kappa * n) < 1e-12


def test_diffusion_generator_singular_configuration():
    v = np.array([[0.2, 0.0, 0.0], [0.2, 0.0, 0.0], [1.0, 1.0, 1.0]])
    cfg = InteractionConfig(alpha=1.0, enable_mollifier=False,
                            mollifier_scale=1.0, identity_weight=0.0)
    phi = GaussianBump(np.zeros((2, 3)), scale=1.0)
    with pytest.raises(ValueError, match="singular configuration"):
        diffusion_generator_apply(phi, SystemState(v), cfg)


def test_grazing_limit_study_converges(rng):
    state = SystemState(np.array([[0.8, 0.2, -0.1],
                                  [-0.5, 0.6, 0.4],
                                  [0.1, -0.9, 0.3],
                                  [-0.4, 0.1, -0.6]]))
    phi = GaussianBump(np.array([[0.5, 0.0, 0.0], [-0.5, 0.2, 0.1]]),
                       scale=1.4)
    report = grazing_limit_study(phi, state, KernelConfig(),
                                 [0.8, 0.4, 0.2, 0.1, 0.05])
    assert report.monotone
    assert report.errors[-1] < 0.02 * max(1.0, abs(report.target))
    assert report.slope > 0.8


def test_grazing_limit_study_validation():
    state = SystemState(np.zeros((2, 3)) + [[0, 0, 0], [1, 0, 0]])
    phi = energy(1)
    with pytest.raises(ValueError, match="four scales"):
        grazing_limit_study(phi, state, None, [0.4, 0.2, 0.1])
    with pytest.raises(ValueError, match="positive"):
        grazing_limit_study(phi, state, None, [0.4, 0.2, 0.1, -0.05])

"""Generator applications: collision jumps versus limiting diffusion.

jump_generator_apply integrates the collision operator against a test
function by surface quadrature over every pair's momentum sphere, with
automatic order escalation until the value settles. Its small-scale
limit is grazing_constant times diffusion_generator_apply evaluated
with the bare (unmollified, no identity block) interaction; the
grazing_limit_study helper measures that convergence on a fixed state.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .core import (InteractionConfig, SystemState, pair_matrix)
from .diffusion import drift
from .kernels import KernelConfig
from .sphere import CollisionSphere
from .testfunctions import TestFunction

__all__ = [
    "diffusion_generator_apply",
    "jump_generator_apply",
    "GrazingReport",
    "grazing_limit_study",
]


def diffusion_generator_apply(phi: TestFunction, state: SystemState,
                              cfg: InteractionConfig) -> float:
    """Divergence-form diffusion generator applied to phi at the state.

    Uses the closed-form drift plus the interaction blocks contracted
    against the Hessian; only blocks touching the first j particles
    contribute. With the mollifier disabled, coincident particles make
    the bare coefficient singular and raise.
    """
    n = state.n
    j = phi.j
    if j > n:
        raise ValueError(f"test function needs {j} particles, state has {n}")
    cfg = cfg.resolve(n)
    v = state.velocities
    if not cfg.enable_mollifier:
        for k in range(n):
            for m in range(k + 1, n):
                if k >= j and m >= j:
                    continue
                if np.linalg.norm(v[k] - v[m]) == 0.0:
                    raise ValueError(
                        "singular configuration: coincident particles with "
                        "the mollifier disabled")
    coords = v[:j]
    g = phi.grad(coords)
    H = phi.hess(coords)
    b = drift(state, cfg)
    total = float(np.sum(b[:j] * g))
    kappa = cfg.identity_weight
    for k in range(j):
        diag = np.eye(3) * kappa
        for m in range(n):
            if m == k:
                continue
            a = pair_matrix(v[k] - v[m], cfg)
            diag += a / n
            if m < j:
                total -= float(np.sum((a / n) * H[k, :, m, :]))
        total += float(np.sum(diag * H[k, :, k, :]))
    return total


def _jump_value(phi: TestFunction, state: SystemState, kernel: KernelConfig,
                order: int) -> float:
    n = state.n
    j = phi.j
    v = state.velocities
    eps = kernel.epsilon
    base = float(phi.value(v[:j]))
    total = 0.0
    for i in range(n):
        for l in range(i + 1, n):
            if i >= j and l >= j:
                continue
            u = v[l] - v[i]
            r = float(np.linalg.norm(u))
            if r <= kernel.u_tolerance:
                continue
            sphere = CollisionSphere.from_relative_velocity(u)
            split = kernel.radial_split
            pts, wts = sphere.surface_quadrature(order, split)
            wvals = kernel.profile(np.linalg.norm(pts, axis=1) / eps)
            coords = np.broadcast_to(v[:j], (len(pts), j, 3)).copy()
            if i < j:
                coords[:, i, :] += pts
            if l < j:
                coords[:, l, :] -= pts
            dphi = phi.value(coords) - base
            # both orientations of the ordered-pair sum produce this same
            # transition, so the unordered pair carries twice 1/(2 n eps^4)
            total += float(np.sum(wts * wvals * dphi)) / (n * eps ** 4 * r)
    return total


def jump_generator_apply(phi: TestFunction, state: SystemState,
                         kernel: KernelConfig, epsilon: float | None = None,
                         rtol: float = 1e-10, max_order: int = 512) -> float:
    """Collision generator applied to phi, by escalating quadrature.

    epsilon overrides the kernel's grazing scale when given. Doubles
    the quadrature order until two successive values agree to rtol
    (relative to max(1, |value|)); raises if max_order is reached
    without settling.
    """
    if state.n < 2:
        raise ValueError("jump generator needs at least two particles")
    if epsilon is not None:
        kernel = replace(kernel, epsilon=float(epsilon))
    order = kernel.quadrature_order
    prev = _jump_value(phi, state, kernel, order)
    while 2 * order <= max_order:
        order *= 2
        cur = _jump_value(phi, state, kernel, order)
        if abs(cur - prev) <= rtol * max(1.0, abs(cur), abs(prev)):
            return cur
        prev = cur
    raise RuntimeError(
        f"quadrature escalation exceeded order {max_order} with residual "
        f"estimate {abs(cur - prev):.3e}; increase max_order or relax rtol")


@dataclass(frozen=True)
class GrazingReport:
    """Convergence record of the jump generator toward its limit."""

    epsilons: np.ndarray  # descending
    values: np.ndarray
    target: float
    errors: np.ndarray
    slope: float
    monotone: bool


def grazing_limit_study(phi: TestFunction, state: SystemState,
                        kernel: KernelConfig | None, epsilon_list,
                        rtol: float = 1e-10) -> GrazingReport:
    """Compare the jump generator at several scales with its limit.

    The limit is grazing_constant times the bare Coulomb diffusion
    generator (alpha = 1, no mollifier, no identity block). Errors are
    reported against descending scales together with the fitted decay
    slope in log-log coordinates.
    """
    kernel = KernelConfig() if kernel is None else kernel
    eps = np.sort(np.asarray(epsilon_list, dtype=np.float64))[::-1]
    if eps.size < 4:
        raise ValueError("need at least four scales, decreasing")
    if np.any(eps <= 0):
        raise ValueError("scales must be positive")
    limit_cfg = InteractionConfig(alpha=1.0, mollifier_scale=1.0,
                                  identity_weight=0.0, enable_mollifier=False)
    target = kernel.profile.grazing_constant * diffusion_generator_apply(
        phi, state, limit_cfg)
    values = np.empty(eps.size)
    for idx, e in enumerate(eps):
        values[idx] = jump_generator_apply(phi, state, kernel,
                                           epsilon=float(e), rtol=rtol)
    errors = np.abs(values - target)
    monotone = bool(np.all(np.diff(errors) < 0))
    positive = errors > 0
    if positive.sum() >= 2:
        slope = float(np.polyfit(np.log(eps[positive]),
                                 np.log(errors[positive]), 1)[0])
    else:
        slope = np.inf
    return GrazingReport(epsilons=eps, values=values, target=target,
                         errors=errors, slope=slope, monotone=monotone)

"""Interacting diffusion driven by the regularized pair matrix.

Euler-Maruyama steps of the SDE generated by the divergence form of
the mollified interaction matrix. The noise is factorized pair by
pair: each unordered pair shares one 3-dimensional Gaussian increment,
applied with opposite signs through the pair's matrix square root, so
the increment covariance is exactly twice the interaction matrix
times dt and total momentum is
conserved structurally. The identity regularizer adds independent
per-particle noise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (InteractionConfig, SystemState, div_coefficient,
                   pair_coefficient, pair_indices)

__all__ = [
    "DiffusionConfig",
    "drift",
    "noise_increments",
    "step_euler_maruyama",
    "DiffusionRunResult",
    "run_diffusion",
]


@dataclass(frozen=True)
class DiffusionConfig:
    """Time step, step count, interaction, and the stability guard.

    The guard requires dt <= stability_safety / (n * max pair
    coefficient) at every step; disable it only for exponents where the
    coefficient is not singular (alpha <= 0) and the step size is
    validated independently. steps is optional; drivers may take an
    explicit horizon instead.
    """

    dt: float
    steps: int | None = None
    interaction: InteractionConfig = field(default_factory=InteractionConfig)
    stability_safety: float = 1.0
    guard_enabled: bool = True

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.steps is not None and self.steps < 1:
            raise ValueError("steps must be positive")
        if not 0 < self.stability_safety <= 1:
            raise ValueError("stability_safety must be in (0, 1]")


def _pair_fields(state: SystemState):
    i_idx, j_idx = pair_indices(state.n)
    w = state.velocities[i_idx] - state.velocities[j_idx]
    r = np.linalg.norm(w, axis=1)
    return i_idx, j_idx, w, r


def _scatter_pairs(i_idx, j_idx, vals, n):
    """Accumulate +vals at i and -vals at j, one bincount per component."""
    out = np.empty((n, 3))
    for d in range(3):
        out[:, d] = (np.bincount(i_idx, weights=vals[:, d], minlength=n)
                     - np.bincount(j_idx, weights=vals[:, d], minlength=n))
    return out


def drift(state: SystemState, cfg: InteractionConfig):
    """Row divergence of the interaction matrix, shape (n, 3).

    Closed form -(4/n) sum_j chi_bar(r) w / r^(alpha+2) per particle;
    the mollifier derivative drops out against the projector.
    """
    n = state.n
    cfg = cfg.resolve(n)
    i_idx, j_idx, w, r = _pair_fields(state)
    dc = div_coefficient(r, cfg)
    vals = (2.0 / n) * dc[:, None] * w
    return _scatter_pairs(i_idx, j_idx, vals, n)


def noise_increments(state: SystemState, cfg: InteractionConfig, dt: float,
                     rng):
    """One Gaussian increment with covariance twice the interaction
    matrix times dt, shape (n, 3).

    Per unordered pair a shared N(0, dt I_3) vector enters both particles
    with opposite signs through sqrt(2 c / n) P(w); the identity block
    adds sqrt(2 kappa) per-particle noise. Draw order is fixed: pair
    noise first, particle noise second.
    """
    n = state.n
    cfg = cfg.resolve(n)
    i_idx, j_idx, w, r = _pair_fields(state)
    c = pair_coefficient(r, cfg)
    g = rng.normal(0.0, np.sqrt(dt), size=(len(i_idx), 3))
    amp = np.sqrt(2.0 * c / n)
    mask = c > 0.0
    proj = np.zeros_like(g)
    if np.any(mask):
        what = w[mask] / r[mask, None]
        gm = g[mask]
        proj[mask] = gm - what * np.einsum("ij,ij->i", what, gm)[:, None]
    out = _scatter_pairs(i_idx, j_idx, amp[:, None] * proj, n)
    kappa = cfg.identity_weight
    if kappa > 0.0:
        out += np.sqrt(2.0 * kappa) * rng.normal(0.0, np.sqrt(dt), size=(n, 3))
    return out


_TINY = np.finfo(np.float64).tiny


def _step_coefficients(r, icfg):
    """Pair coefficient and its divergence partner -2 c / r^2 in one pass.

    Mollified path only; the guarded division keeps coincident pairs at
    exactly zero (chi_bar vanishes there). Common exponents skip the
    general power call.
    """
    chib = icfg.mollifier.chi_bar(r)
    safe = np.maximum(r, _TINY)
    a = icfg.alpha
    if a == 1.0:
        c = chib / safe
    elif a == 0.0:
        c = chib
    elif a == -2.0:
        c = chib * safe * safe
    else:
        c = chib * safe ** (-a)
    dc = -2.0 * c / (safe * safe)
    return c, dc, safe


def step_euler_maruyama(state: SystemState, cfg: DiffusionConfig, rng,
                        dt: float | None = None) -> SystemState:
    """One Euler-Maruyama step; zero dt returns the state unchanged."""
    dt = cfg.dt if dt is None else dt
    if dt == 0.0:
        return state.copy()
    n = state.n
    icfg = cfg.interaction.resolve(n)
    i_idx, j_idx = pair_indices(n)
    v = state.velocities
    w = v[i_idx] - v[j_idx]
    r = np.sqrt(np.einsum("ij,ij->i", w, w))
    if icfg.enable_mollifier:
        c, dc, safe = _step_coefficients(r, icfg)
    else:
        c = pair_coefficient(r, icfg)
        dc = div_coefficient(r, icfg)
        safe = np.maximum(r, _TINY)
    if cfg.guard_enabled:
        cmax = float(c.max()) if c.size else 0.0
        if cmax > 0.0 and dt > cfg.stability_safety / (n * cmax):
            raise ValueError(
                f"dt {dt:g} exceeds the stability guard "
                f"{cfg.stability_safety / (n * cmax):g}; reduce dt or "
                "disable the guard")
    g = rng.normal(0.0, np.sqrt(dt), size=(len(i_idx), 3))
    what = w / safe[:, None]
    proj = g - what * np.einsum("ij,ij->i", what, g)[:, None]
    # drift and pair noise share one scatter; amp = 0 wherever c = 0;
    # dt multiplies last so a diverging drift overflows cleanly instead
    # of producing inf * 0
    vals = (((2.0 / n) * dc)[:, None] * w) * dt \
        + np.sqrt((2.0 / n) * c)[:, None] * proj
    incr = _scatter_pairs(i_idx, j_idx, vals, n)
    kappa = icfg.identity_weight
    if kappa > 0.0:
        incr += np.sqrt(2.0 * kappa) * rng.normal(0.0, np.sqrt(dt),
                                                  size=(n, 3))
    v = v + incr
    if not np.all(np.isfinite(v)):
        raise ValueError("blow-up: reduce dt")
    return SystemState(v, state.time + dt)


@dataclass
class DiffusionRunResult:
    times: np.ndarray
    states: np.ndarray  # (T, n, 3)

    def state_at(self, idx: int) -> SystemState:
        return SystemState(self.states[idx].copy(), float(self.times[idx]))


def run_diffusion(initial_sampler, n: int, cfg: DiffusionConfig,
                  horizon: float | None, rng,
                  snapshot_interval: float | None = None) -> DiffusionRunResult:
    """Integrate to the horizon, recording snapshots every interval.

    The horizon is rounded to a whole number of steps (horizon None
    falls back to cfg.steps; horizon 0 returns the initial snapshot
    alone); the snapshot interval is rounded the same way.
    """
    if horizon is None:
        if cfg.steps is None:
            raise ValueError("need either a horizon or cfg.steps")
        steps = cfg.steps
    elif horizon < 0:
        raise ValueError("horizon must be nonnegative")
    elif horizon == 0:
        v0 = np.asarray(initial_sampler(rng, n), dtype=np.float64)
        state = SystemState(v0)
        return DiffusionRunResult(times=np.zeros(1),
                                  states=state.velocities[None, :, :].copy())
    else:
        steps = max(1, int(round(horizon / cfg.dt)))
    if snapshot_interval is None:
        every = steps
    else:
        every = max(1, int(round(snapshot_interval / cfg.dt)))
    v0 = np.asarray(initial_sampler(rng, n), dtype=np.float64)
    state = SystemState(v0)
    snap_idx = list(range(0, steps + 1, every))
    if snap_idx[-1] != steps:
        snap_idx.append(steps)
    states = np.empty((len(snap_idx), n, 3))
    times = np.empty(len(snap_idx))
    states[0], times[0] = state.velocities, 0.0
    pos = 1
    for k in range(1, steps + 1):
        state = step_euler_maruyama(state, cfg, rng)
        if pos < len(snap_idx) and k == snap_idx[pos]:
            states[pos] = state.velocities
            times[pos] = state.time
            pos += 1
    return DiffusionRunResult(times=times, states=states)

"""Collision jump process with exact pairwise conservation.

The system evolves by a continuous-time Markov chain: each ordered pair
(i, j) collides at rate 1/(2 n eps^4 |u|) times the surface integral of
the scaled kernel over the admissible momentum sphere, and a collision
moves (v_i, v_j) to (v_i + p, v_j - p). The sphere passes through the
origin, so momentum and kinetic energy are conserved to rounding per
event.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import SystemState
from .kernels import KernelConfig
from .sphere import CollisionSphere, gauss_01

__all__ = [
    "pair_rate",
    "pair_rates_from_norms",
    "sample_exchanged_momentum",
    "apply_collision",
    "step_jump",
    "JumpProcess",
    "JumpRunResult",
    "run_jump",
]


def pair_rates_from_norms(rnorms, kernel: KernelConfig, n: int):
    """Vectorized collision rate as a function of |u|.

    The sphere integral reduces on the axisymmetric chart dS = s ds dphi
    to 2 pi * int_0^|u| w(s/eps) s ds, evaluated with the configured
    two-panel Gauss-Legendre rule.
    """
    r = np.atleast_1d(np.asarray(rnorms, dtype=np.float64))
    eps = kernel.epsilon
    out = np.zeros_like(r)
    mask = r > kernel.u_tolerance
    if np.any(mask):
        rm = r[mask]
        x, gw = gauss_01(kernel.quadrature_order)
        split = kernel.radial_split
        s_star = np.minimum(split, rm) if split is not None else 0.5 * rm
        s1 = s_star[:, None] * x[None, :]
        w1 = s_star[:, None] * gw[None, :]
        s2 = s_star[:, None] + (rm - s_star)[:, None] * x[None, :]
        w2 = (rm - s_star)[:, None] * gw[None, :]
        prof = kernel.profile
        integral = (np.sum(w1 * s1 * prof(s1 / eps), axis=1)
                    + np.sum(w2 * s2 * prof(s2 / eps), axis=1))
        out[mask] = np.pi * integral / (n * eps ** 4 * rm)
    return out


def pair_rate(u, kernel: KernelConfig, n: int) -> float:
    """Collision rate of one ordered pair with relative velocity u."""
    r = float(np.linalg.norm(np.asarray(u, dtype=np.float64)))
    return float(pair_rates_from_norms(np.array([r]), kernel, n)[0])


def sample_exchanged_momentum(u, kernel: KernelConfig, rng) -> np.ndarray:
    """Draw p on the admissible sphere with density proportional to w(|p|/eps).

    Uniform area proposal, accepted with probability w(|p|/eps)/w(0).
    Raises when the acceptance rate is so low that the configured
    attempt cap is exhausted.
    """
    sph = CollisionSphere.from_relative_velocity(u)
    prof = kernel.profile
    eps = kernel.epsilon
    m = prof.value_at_zero
    batch = 64
    attempts = 0
    while attempts < kernel.rejection_cap:
        k = min(batch, kernel.rejection_cap - attempts)
        pts = sph.sample_uniform(rng, k)
        accept = rng.random(k) * m <= prof(np.linalg.norm(pts, axis=1) / eps)
        attempts += k
        hits = np.nonzero(accept)[0]
        if hits.size:
            return pts[hits[0]]
    raise ValueError("kernel too concentrated for rejection sampling")


def apply_collision(state: SystemState, i: int, j: int, p) -> SystemState:
    """Exchange momentum p between particles i and j (new state)."""
    if i == j:
        raise ValueError("collision requires two distinct particles")
    v = state.velocities.copy()
    p = np.asarray(p, dtype=np.float64)
    v[i] += p
    v[j] -= p
    return SystemState(v, state.time)


class JumpProcess:
    """Stateful sampler of the collision chain (incremental rate table)."""

    def __init__(self, state: SystemState, kernel: KernelConfig, rng):
        if state.n < 2:
            raise ValueError("jump dynamics requires n >= 2")
        self.kernel = kernel
        self.rng = rng
        self.v = state.velocities.copy()
        self.time = state.time
        self.n = state.n
        self.events = 0
        self.rates = np.zeros((self.n, self.n))
        self._refresh_all()

    def _rate_row(self, k: int):
        diffs = self.v - self.v[k]
        r = np.linalg.norm(diffs, axis=1)
        row = pair_rates_from_norms(r, self.kernel, self.n)
        row[k] = 0.0
        return row

    def _refresh_all(self):
        for k in range(self.n):
            self.rates[k] = self._rate_row(k)

    def _refresh_particle(self, k: int):
        row = self._rate_row(k)
        self.rates[k, :] = row
        self.rates[:, k] = row

    @property
    def total_rate(self) -> float:
        return float(self.rates.sum())

    def state(self) -> SystemState:
        return SystemState(self.v.copy(), self.time)

    def step(self, horizon: float | None = None):
        """Advance one event; returns the waiting time, or None when the
        horizon is reached first (time is then clamped to the horizon)."""
        total = self.total_rate
        if total <= 0.0:
            if horizon is None:
                raise ValueError("total collision rate is zero")
            self.time = horizon
            return None
        wait = self.rng.exponential(1.0 / total)
        if horizon is not None and self.time + wait > horizon:
            self.time = horizon
            return None
        self.time += wait
        row_sums = self.rates.sum(axis=1)
        i = int(self.rng.choice(self.n, p=row_sums / row_sums.sum()))
        j = int(self.rng.choice(self.n, p=self.rates[i] / row_sums[i]))
        u = self.v[j] - self.v[i]
        p = sample_exchanged_momentum(u, self.kernel, self.rng)
        self.v[i] += p
        self.v[j] -= p
        self.events += 1
        self._refresh_particle(i)
        self._refresh_particle(j)
        return wait


def step_jump(state: SystemState, kernel: KernelConfig, rng,
              horizon: float | None = None):
    """One event of the collision chain; returns (new state, waiting time).

    waiting time is None when the horizon cuts the step short.
    """
    proc = JumpProcess(state, kernel, rng)
    wait = proc.step(horizon)
    return proc.state(), wait


@dataclass
class JumpRunResult:
    times: np.ndarray
    states: np.ndarray  # (T, n, 3)
    n_events: int
    event_times: np.ndarray = field(default_factory=lambda: np.empty(0))

    def state_at(self, idx: int) -> SystemState:
        return SystemState(self.states[idx].copy(), float(self.times[idx]))


def run_jump(initial_sampler, n: int, kernel: KernelConfig, horizon: float,
             rng, snapshot_interval: float | None = None,
             record_events: bool = False) -> JumpRunResult:
    """Simulate the collision chain to the horizon, recording snapshots.

    initial_sampler(rng, n) supplies the starting velocities. Snapshots
    are the piecewise-constant states at multiples of snapshot_interval
    (plus the initial and final times).
    """
    if horizon < 0:
        raise ValueError("horizon must be nonnegative")
    v0 = np.asarray(initial_sampler(rng, n), dtype=np.float64)
    proc = JumpProcess(SystemState(v0), kernel, rng)
    if horizon == 0:
        return JumpRunResult(times=np.zeros(1), states=proc.v[None].copy(),
                             n_events=0, event_times=np.empty(0))
    if snapshot_interval is None:
        snap_times = np.array([0.0, horizon])
    else:
        count = int(np.floor(horizon / snapshot_interval + 1e-9))
        snap_times = snapshot_interval * np.arange(count + 1)
        if snap_times[-1] < horizon - 1e-12 * horizon:
            snap_times = np.append(snap_times, horizon)
        else:
            snap_times[-1] = horizon
    states = np.empty((len(snap_times), n, 3))
    states[0] = proc.v
    next_idx = 1
    event_times = [] if record_events else None
    while proc.time < horizon:
        before = proc.v.copy()
        wait = proc.step(horizon)
        while next_idx < len(snap_times) and snap_times[next_idx] <= proc.time:
            # the state at a snapshot time is the pre-event state unless
            # the event lands exactly on it
            if wait is None or snap_times[next_idx] < proc.time:
                states[next_idx] = before
            else:
                states[next_idx] = proc.v
            next_idx += 1
        if record_events and wait is not None:
            event_times.append(proc.time)
    while next_idx < len(snap_times):
        states[next_idx] = proc.v
        next_idx += 1
    return JumpRunResult(
        times=snap_times,
        states=states,
        n_events=proc.events,
        event_times=np.asarray(event_times if event_times else []),
    )

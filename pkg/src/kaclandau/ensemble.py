"""Seeded ensembles of independent trajectories.

Run r of an ensemble draws from numpy's SeedSequence(master_seed,
spawn_key=(r,)), so every run's stream is fixed by (master_seed, r)
alone. Results are therefore identical whatever the worker count or
completion order; the pool only changes who computes which run.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .diffusion import DiffusionConfig, run_diffusion
from .initial import make_sampler
from .jump import run_jump
from .kernels import KernelConfig

__all__ = [
    "RunSpec",
    "EnsembleRun",
    "run_seed",
    "run_single",
    "run_ensemble",
]


def run_seed(master_seed: int, run_index: int) -> np.random.SeedSequence:
    """The documented per-run seed derivation; stable public contract."""
    if master_seed < 0 or run_index < 0:
        raise ValueError("seeds and run indices are nonnegative")
    return np.random.SeedSequence(master_seed, spawn_key=(run_index,))


@dataclass(frozen=True)
class RunSpec:
    """Picklable description of one trajectory's dynamics.

    mode selects the jump chain or the diffusion; the matching config
    field must be set. The initial condition travels as (kind, params)
    so worker processes can rebuild the sampler.
    """

    mode: str
    n: int
    horizon: float
    snapshot_interval: float | None = None
    kernel: KernelConfig | None = None
    diffusion: DiffusionConfig | None = None
    initial_kind: str = "gaussian"
    initial_params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.mode not in ("jump", "diffusion"):
            raise ValueError("mode must be jump or diffusion")
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.mode == "jump" and self.n < 2:
            raise ValueError("jump dynamics requires n >= 2")
        if self.horizon < 0:
            raise ValueError("horizon must be nonnegative")
        if self.snapshot_interval is not None and self.snapshot_interval <= 0:
            raise ValueError("snapshot interval must be positive")
        if self.mode == "jump" and self.kernel is None:
            object.__setattr__(self, "kernel", KernelConfig())
        if self.mode == "diffusion" and self.diffusion is None:
            raise ValueError("diffusion mode needs a DiffusionConfig")
        # fail fast on a bad initial condition before any worker starts
        make_sampler(self.initial_kind, **self.initial_params)


@dataclass
class EnsembleRun:
    """Trajectories on a shared snapshot schedule.

    states has shape (runs, T, n, 3); times (T,) is identical for every
    run by construction. event_counts is zero-filled for the diffusion.
    """

    master_seed: int
    times: np.ndarray
    states: np.ndarray
    event_counts: np.ndarray

    @property
    def runs(self) -> int:
        return self.states.shape[0]

    @property
    def n(self) -> int:
        return self.states.shape[2]

    @property
    def final_states(self) -> np.ndarray:
        return self.states[:, -1, :, :]


def run_single(spec: RunSpec, master_seed: int, run_index: int):
    """Execute one trajectory; returns (times, states, event_count)."""
    rng = np.random.default_rng(run_seed(master_seed, run_index))
    sampler = make_sampler(spec.initial_kind, **spec.initial_params)
    if spec.mode == "jump":
        res = run_jump(sampler, spec.n, spec.kernel, spec.horizon, rng,
                       snapshot_interval=spec.snapshot_interval)
        return res.times, res.states, res.n_events
    res = run_diffusion(sampler, spec.n, spec.diffusion, spec.horizon, rng,
                        snapshot_interval=spec.snapshot_interval)
    return res.times, res.states, 0


def _worker(args):
    spec, master_seed, run_index = args
    return run_single(spec, master_seed, run_index)


def run_ensemble(spec: RunSpec, runs: int, master_seed: int,
                 workers: int = 1) -> EnsembleRun:
    """Run an ensemble; outputs do not depend on the worker count."""
    if runs < 1:
        raise ValueError("runs must be at least 1")
    if workers < 1:
        raise ValueError("workers must be at least 1")
    jobs = [(spec, master_seed, r) for r in range(runs)]
    if workers == 1 or runs == 1:
        results = [_worker(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_worker, jobs))
    times = results[0][0]
    states = np.stack([r[1] for r in results])
    events = np.array([r[2] for r in results], dtype=np.int64)
    for t, _, _ in results[1:]:
        if t.shape != times.shape or not np.array_equal(t, times):
            raise RuntimeError("runs disagree on the snapshot schedule")
    return EnsembleRun(master_seed=master_seed, times=times, states=states,
                       event_counts=events)

"""Initial velocity samplers.

Each factory returns a callable sample(rng, n) -> (n, 3) float64 array
so runs stay reproducible: the caller owns the generator and the
sampler draws from it exactly once per run.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "gaussian",
    "anisotropic_gaussian",
    "bimaxwellian",
    "from_array",
    "make_sampler",
]


def gaussian(temperature: float = 1.0):
    """Isotropic centered Gaussian with the given per-axis variance."""
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    sd = np.sqrt(temperature)

    def sample(rng, n: int):
        return rng.normal(0.0, sd, size=(n, 3))

    return sample


def anisotropic_gaussian(t1: float, t2: float, t3: float):
    """Centered Gaussian with axis variances (t1, t2, t3)."""
    temps = np.array([t1, t2, t3], dtype=np.float64)
    if np.any(temps <= 0):
        raise ValueError("temperatures must be positive")
    sd = np.sqrt(temps)

    def sample(rng, n: int):
        return rng.normal(0.0, 1.0, size=(n, 3)) * sd

    return sample


def bimaxwellian(shift: float, temperature: float = 1.0):
    """Even mixture of two isotropic Gaussians centered at +-shift e1.

    Total momentum is zero only in expectation; pass the draws through
    a mean subtraction outside if an exactly centered sample is needed.
    """
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    sd = np.sqrt(temperature)

    def sample(rng, n: int):
        v = rng.normal(0.0, sd, size=(n, 3))
        signs = np.where(rng.random(n) < 0.5, 1.0, -1.0)
        v[:, 0] += signs * shift
        return v

    return sample


def from_array(velocities):
    """Wrap a fixed array as a sampler; n must match at call time."""
    v = np.ascontiguousarray(velocities, dtype=np.float64)
    if v.ndim != 2 or v.shape[1] != 3:
        raise ValueError("velocities must have shape (n, 3)")

    def sample(rng, n: int):
        if n != v.shape[0]:
            raise ValueError(
                f"fixed initial data has {v.shape[0]} particles, not {n}")
        return v.copy()

    return sample


_FACTORIES = {
    "gaussian": gaussian,
    "anisotropic_gaussian": anisotropic_gaussian,
    "bimaxwellian": bimaxwellian,
}


def make_sampler(kind: str, **params):
    """Build a sampler by name; see _FACTORIES for the known kinds."""
    try:
        factory = _FACTORIES[kind]
    except KeyError:
        known = ", ".join(sorted(_FACTORIES))
        raise ValueError(f"unknown initial condition {kind!r}; "
                         f"known kinds: {known}") from None
    return factory(**params)

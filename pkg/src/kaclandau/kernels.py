"""Radial collision kernels and their scaling configuration.

The default Gaussian profile is normalized so that the grazing-collision
limit of the jump generator reproduces the pair-diffusion generator with
unit coefficient: the limit constant is (pi/2) times the third radial
moment of the profile, so amplitude 1/pi makes it exactly 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["RadialKernel", "KernelConfig", "GRAZING_AMPLITUDE", "UNIT_MASS_AMPLITUDE"]

GRAZING_AMPLITUDE = 1.0 / np.pi
UNIT_MASS_AMPLITUDE = (2.0 * np.pi) ** -1.5


@dataclass(frozen=True)
class RadialKernel:
    """Nonnegative bounded radial profile w(s).

    kind "gaussian": w(s) = amplitude * exp(-s^2/2), monotone decreasing.
    kind "uniform": w(s) = amplitude, used by sampling-uniformity tests.
    """

    kind: str = "gaussian"
    amplitude: float = GRAZING_AMPLITUDE

    def __post_init__(self):
        if self.kind not in ("gaussian", "uniform"):
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if not self.amplitude > 0:
            raise ValueError("kernel amplitude must be positive")

    def __call__(self, s):
        s = np.asarray(s, dtype=np.float64)
        if self.kind == "gaussian":
            return self.amplitude * np.exp(-0.5 * s * s)
        return np.full_like(s, self.amplitude)

    @property
    def value_at_zero(self) -> float:
        return self.amplitude

    @property
    def decay_scale(self) -> float | None:
        """Radius beyond which the profile is numerically negligible."""
        return 8.5 if self.kind == "gaussian" else None

    @property
    def third_moment(self) -> float:
        """Integral of s^3 w(s) over [0, inf)."""
        if self.kind == "gaussian":
            return 2.0 * self.amplitude
        return np.inf

    @property
    def grazing_constant(self) -> float:
        """Constant multiplying the pair-diffusion generator in the limit."""
        return 0.5 * np.pi * self.third_moment

    @classmethod
    def gaussian(cls, amplitude: float = GRAZING_AMPLITUDE) -> "RadialKernel":
        return cls("gaussian", amplitude)

    @classmethod
    def uniform(cls, amplitude: float = 1.0) -> "RadialKernel":
        return cls("uniform", amplitude)


@dataclass(frozen=True)
class KernelConfig:
    """Collision kernel with grazing scale and quadrature controls.

    epsilon: grazing scale (1 = unscaled); the kernel in use is
        w(|p|/epsilon) with total rate prefactor 1/(2 n epsilon^4 |u|)
        on the momentum sphere.
    quadrature_order: radial Gauss-Legendre nodes per panel in rate and
        generator integrals.
    u_tolerance: relative velocities below this give rate 0.
    rejection_cap: attempts allowed to the rejection sampler.
    """

    profile: RadialKernel = field(default_factory=RadialKernel.gaussian)
    epsilon: float = 1.0
    quadrature_order: int = 32
    u_tolerance: float = 1e-12
    rejection_cap: int = 100_000

    def __post_init__(self):
        if not 0 < self.epsilon <= 1:
            raise ValueError("epsilon must be in (0, 1]")
        if self.quadrature_order < 4:
            raise ValueError("quadrature order must be at least 4")
        if self.u_tolerance < 0:
            raise ValueError("u tolerance must be nonnegative")
        if self.rejection_cap < 1:
            raise ValueError("rejection cap must be positive")

    @property
    def radial_split(self) -> float | None:
        """Panel split adapted to the scaled kernel's decay."""
        d = self.profile.decay_scale
        return None if d is None else d * self.epsilon

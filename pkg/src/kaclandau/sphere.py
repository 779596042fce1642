"""Geometry of the admissible exchanged-momentum sphere.

For an ordered pair with relative velocity u (target minus source), the
energy-conserving exchanged momenta p satisfy p.p = p.u, the sphere of
center u/2 and radius |u|/2 passing through the origin. On that sphere
the speed s = |p| runs over [0, |u|] and the surface measure factorizes
as dS = s ds dphi, which both the quadrature and the uniform sampler
exploit.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss

__all__ = ["CollisionSphere", "radial_nodes", "orthonormal_frame", "gauss_01"]


@lru_cache(maxsize=32)
def gauss_01(order: int):
    """Gauss-Legendre nodes and weights mapped to [0, 1] (cached)."""
    x, w = leggauss(order)
    return 0.5 * (x + 1.0), 0.5 * w


def orthonormal_frame(axis):
    """Two unit vectors completing axis to an orthonormal triple."""
    a = np.asarray(axis, dtype=np.float64)
    k = int(np.argmin(np.abs(a)))
    e1 = np.zeros(3)
    e1[k] = 1.0
    e1 = e1 - a * a[k]
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(a, e1)
    return e1, e2


def radial_nodes(upper: float, order: int, split: float | None = None):
    """Gauss-Legendre nodes/weights on [0, upper], optionally two panels.

    split concentrates nodes below a kernel decay scale; it is clipped
    into (0, upper). Weights integrate ds (no measure factor).
    """
    x, wts = gauss_01(order)
    if split is None or split >= upper:
        return upper * x, upper * wts
    split = min(max(split, 1e-12 * upper), upper)
    s1, w1 = split * x, split * wts
    s2 = split + (upper - split) * x
    w2 = (upper - split) * wts
    return np.concatenate([s1, s2]), np.concatenate([w1, w2])


@dataclass(frozen=True)
class CollisionSphere:
    """Admissible momentum sphere for one ordered pair."""

    center: np.ndarray
    radius: float

    @classmethod
    def from_relative_velocity(cls, u) -> "CollisionSphere":
        u = np.asarray(u, dtype=np.float64)
        r = float(np.linalg.norm(u))
        if r == 0.0:
            raise ValueError("degenerate direction")
        return cls(center=u / 2.0, radius=r / 2.0)

    @property
    def axis(self):
        return self.center / self.radius

    def points_at(self, s, phi):
        """Sphere points with |p| = s and azimuth phi around the axis."""
        s = np.asarray(s, dtype=np.float64)
        phi = np.asarray(phi, dtype=np.float64)
        R = self.radius
        ct = np.clip(s * s / (2.0 * R * R) - 1.0, -1.0, 1.0)
        st = np.sqrt(np.maximum(0.0, 1.0 - ct * ct))
        e1, e2 = orthonormal_frame(self.axis)
        return (self.center
                + R * (ct[..., None] * self.axis
                       + st[..., None] * (np.cos(phi)[..., None] * e1
                                          + np.sin(phi)[..., None] * e2)))

    def surface_quadrature(self, order: int, split: float | None = None):
        """Nodes and dS weights of a product rule in (speed, azimuth).

        order radial Gauss-Legendre nodes per panel (two panels when
        split lands inside the range) times 2*order uniform azimuths.
        Weights sum to the sphere area.
        """
        s, ws = radial_nodes(2.0 * self.radius, order, split)
        m = 2 * order
        phi = (np.arange(m) + 0.5) * (2.0 * np.pi / m)
        S, PHI = np.meshgrid(s, phi, indexing="ij")
        pts = self.points_at(S.ravel(), PHI.ravel())
        wts = (ws[:, None] * s[:, None] * (2.0 * np.pi / m)
               * np.ones((1, m))).ravel()
        return pts, wts

    def sample_uniform(self, rng, size: int | None = None):
        """Uniform surface points via the area chart (s^2, phi)."""
        shape = () if size is None else (size,)
        s = 2.0 * self.radius * np.sqrt(rng.random(shape))
        phi = 2.0 * np.pi * rng.random(shape)
        return self.points_at(s, phi)

"""Velocity states and the regularized pair-interaction matrix.

The interacting system lives in velocity space. Each unordered pair of
particles carries a 3x3 coefficient block built from the projector onto
the plane orthogonal to their relative velocity, a power-law radial
factor, and a smooth short-range cutoff. The block matrix assembled from
these coefficients drives both the diffusion dynamics and the analytic
checks in the rest of the package.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

__all__ = [
    "SystemState",
    "InteractionConfig",
    "Mollifier",
    "projection_matrix",
    "pair_matrix",
    "interaction_matrix",
    "quadratic_form",
    "pair_coefficient",
    "div_coefficient",
    "pair_indices",
]

DENSE_ASSEMBLY_LIMIT = 128


@dataclass
class SystemState:
    """Velocities of n particles at a simulation time.

    velocities has shape (n, 3), float64. n >= 1; the jump dynamics
    additionally requires n >= 2 (no pairs otherwise).
    """

    velocities: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        v = np.ascontiguousarray(np.asarray(self.velocities, dtype=np.float64))
        if v.ndim != 2 or v.shape[1] != 3 or v.shape[0] < 1:
            raise ValueError("velocities must have shape (n, 3) with n >= 1")
        if not np.all(np.isfinite(v)):
            raise ValueError("velocities must be finite")
        if self.time < 0:
            raise ValueError("time must be nonnegative")
        self.velocities = v

    @property
    def n(self) -> int:
        return self.velocities.shape[0]

    def copy(self) -> "SystemState":
        return SystemState(self.velocities.copy(), self.time)


def _smoothstep(t):
    # quintic smoothstep: value/slope/curvature vanish at both ends
    t = np.clip(t, 0.0, 1.0)
    return t * t * t * (t * (6.0 * t - 15.0) + 10.0)


@dataclass(frozen=True)
class Mollifier:
    """Short-range cutoff profile chi.

    chi(r) = 1 for r <= delta, 0 for r >= 2 delta, and a quintic
    smoothstep in between (C^2, nonincreasing, endpoint values exact).
    chi_bar = 1 - chi is the complementary far-field factor.
    """

    delta: float

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("mollifier scale must be positive")

    def chi(self, r):
        return 1.0 - self.chi_bar(r)

    def chi_bar(self, r):
        r = np.asarray(r, dtype=np.float64)
        return _smoothstep((r - self.delta) / self.delta)


@dataclass(frozen=True)
class InteractionConfig:
    """Parameters of the pair interaction.

    alpha: radial exponent of the pair coefficient |w|^-alpha (alpha < 2;
        1 is the Coulomb value, -2 gives globally smooth coefficients).
    mollifier_scale: cutoff scale of the short-range mollifier; None
        means "resolve to 1/n" when a state is available.
    identity_weight: weight of the identity block added to each diagonal
        entry of the interaction matrix; None resolves to 1/n.
    enable_mollifier: disable to use the bare singular coefficient
        (needed by the limiting-generator evaluations).
    """

    alpha: float = 1.0
    mollifier_scale: float | None = None
    identity_weight: float | None = None
    enable_mollifier: bool = True

    def __post_init__(self):
        if not self.alpha < 2:
            raise ValueError("alpha must be < 2")
        if self.mollifier_scale is not None and not self.mollifier_scale > 0:
            raise ValueError("mollifier scale must be positive")
        if self.identity_weight is not None and self.identity_weight < 0:
            raise ValueError("identity weight must be nonnegative")

    def resolve(self, n: int) -> "InteractionConfig":
        """Fill 1/n defaults for a concrete particle count."""
        scale = self.mollifier_scale if self.mollifier_scale is not None else 1.0 / n
        weight = self.identity_weight if self.identity_weight is not None else 1.0 / n
        return replace(self, mollifier_scale=scale, identity_weight=weight)

    @property
    def mollifier(self) -> Mollifier:
        if self.mollifier_scale is None:
            raise ValueError("mollifier scale unresolved; call resolve(n) first")
        return Mollifier(self.mollifier_scale)


def projection_matrix(w, tol: float = 0.0):
    """Projector onto the plane orthogonal to w: I - w w^T / |w|^2."""
    w = np.asarray(w, dtype=np.float64)
    r = float(np.linalg.norm(w))
    if r <= tol or r == 0.0:
        raise ValueError("degenerate direction")
    what = w / r
    return np.eye(3) - np.outer(what, what)


def pair_coefficient(r, cfg: InteractionConfig):
    """Scalar coefficient chi_bar(r) r^-alpha of the pair block.

    Vectorized over r. Zero inside the mollified core; with the
    mollifier disabled, r = 0 is the caller's error to avoid.
    """
    r = np.asarray(r, dtype=np.float64)
    if cfg.enable_mollifier:
        chib = cfg.mollifier.chi_bar(r)
        out = np.zeros_like(r)
        mask = chib > 0.0
        np.divide(chib, np.power(r, cfg.alpha, where=mask, out=np.ones_like(r)),
                  where=mask, out=out)
        return out
    with np.errstate(divide="raise"):
        return np.power(r, -cfg.alpha)


def div_coefficient(r, cfg: InteractionConfig):
    """Coefficient of w in the divergence of the pair block.

    div of chi_bar(|w|) |w|^-alpha P(w) equals -2 chi_bar(|w|)
    w / |w|^(alpha+2); the mollifier-derivative term cancels against the
    projector (P(w) w = 0), so this closed form holds in the cutoff
    annulus as well. Returns -2 chi_bar(r) / r^(alpha+2), vectorized.
    """
    r = np.asarray(r, dtype=np.float64)
    if cfg.enable_mollifier:
        chib = cfg.mollifier.chi_bar(r)
        out = np.zeros_like(r)
        mask = chib > 0.0
        np.divide(-2.0 * chib,
                  np.power(r, cfg.alpha + 2.0, where=mask, out=np.ones_like(r)),
                  where=mask, out=out)
        return out
    with np.errstate(divide="raise"):
        return -2.0 * np.power(r, -(cfg.alpha + 2.0))


def pair_matrix(w, cfg: InteractionConfig):
    """Mollified 3x3 pair block chi_bar(|w|) |w|^-alpha P(w).

    Returns the zero matrix for |w| inside the mollified core. With the
    mollifier disabled this is the bare coefficient and w = 0 raises.
    """
    w = np.asarray(w, dtype=np.float64)
    r = float(np.linalg.norm(w))
    if cfg.enable_mollifier:
        c = float(pair_coefficient(r, cfg))
        if c == 0.0:
            return np.zeros((3, 3))
        return c * projection_matrix(w)
    if r == 0.0:
        raise ValueError("degenerate direction")
    return float(r ** -cfg.alpha) * projection_matrix(w)


@lru_cache(maxsize=64)
def pair_indices(n: int):
    """Index arrays (i, j) of the n(n-1)/2 unordered pairs, i < j."""
    iu = np.triu_indices(n, k=1)
    return iu[0].astype(np.intp), iu[1].astype(np.intp)


def _pair_geometry(state: SystemState):
    i_idx, j_idx = pair_indices(state.n)
    w = state.velocities[i_idx] - state.velocities[j_idx]
    r = np.linalg.norm(w, axis=1)
    return i_idx, j_idx, w, r


def interaction_matrix(state: SystemState, cfg: InteractionConfig):
    """Dense 3n x 3n interaction matrix (test and small-n oracle path).

    Off-diagonal blocks are -pair_matrix/n, diagonal blocks the balancing
    row sums plus identity_weight times the identity. Symmetric positive
    semidefinite by construction.
    """
    n = state.n
    if n > DENSE_ASSEMBLY_LIMIT:
        raise ValueError("dense assembly too large")
    cfg = cfg.resolve(n)
    v = state.velocities
    mat = np.zeros((3 * n, 3 * n))
    for i in range(n):
        diag = np.eye(3) * cfg.identity_weight
        for j in range(n):
            if j == i:
                continue
            a = pair_matrix(v[i] - v[j], cfg)
            mat[3 * i:3 * i + 3, 3 * j:3 * j + 3] = -a / n
            diag += a / n
        mat[3 * i:3 * i + 3, 3 * i:3 * i + 3] = diag
    return mat


def quadratic_form(state: SystemState, cfg: InteractionConfig, xi) -> float:
    """Quadratic form of the interaction matrix without assembling it.

    Equals (1/(2n)) sum over ordered pairs of the mollified coefficient
    times the squared projected difference of the test vectors, plus
    identity_weight times the squared norm; O(n^2), matches the dense
    contraction exactly and is nonnegative.
    """
    n = state.n
    cfg = cfg.resolve(n)
    xi = np.asarray(xi, dtype=np.float64).reshape(n, 3)
    i_idx, j_idx, w, r = _pair_geometry(state)
    c = pair_coefficient(r, cfg)
    dxi = xi[i_idx] - xi[j_idx]
    mask = c > 0.0
    total = 0.0
    if np.any(mask):
        what = w[mask] / r[mask, None]
        d = dxi[mask]
        proj_sq = np.einsum("ij,ij->i", d, d) - np.einsum("ij,ij->i", d, what) ** 2
        total = float(np.dot(c[mask], proj_sq))
    # unordered pair sum carries 1/n, i.e. (1/(2n)) over ordered pairs
    return total / n + cfg.identity_weight * float(np.sum(xi * xi))

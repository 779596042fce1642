"""Smooth observables of the first j particles.

Weak-form diagnostics integrate the generator against test functions,
so every class here exposes value, grad, and hess with matching
conventions: input (..., j, 3), gradient (..., j, 3), Hessian
(..., j, 3, j, 3). All are vectorized over leading ensemble axes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "TestFunction",
    "Polynomial",
    "GaussianBump",
    "SmoothBump",
    "energy",
    "fourth_moment",
]

MAX_DEGREE = 4


class TestFunction:
    """Interface: value/grad/hess over the first j particle slots."""

    j: int

    def value(self, coords):  # (..., j, 3) -> (...,)
        raise NotImplementedError

    def grad(self, coords):  # (..., j, 3) -> (..., j, 3)
        raise NotImplementedError

    def hess(self, coords):  # (..., j, 3) -> (..., j, 3, j, 3)
        raise NotImplementedError

    def _check(self, coords):
        coords = np.asarray(coords, dtype=np.float64)
        if coords.ndim < 2 or coords.shape[-2:] != (self.j, 3):
            raise ValueError(
                f"expected trailing shape ({self.j}, 3), got {coords.shape}")
        return coords


@dataclass(frozen=True, eq=False)
class Polynomial(TestFunction):
    """Sum of monomials c * prod coords**e with exponent arrays (j, 3)."""

    j: int
    terms: tuple  # ((coeff, exponents), ...)
    label: str = ""

    def __post_init__(self):
        norm = []
        for coeff, expo in self.terms:
            expo = np.asarray(expo, dtype=np.int64)
            if expo.shape != (self.j, 3) or np.any(expo < 0):
                raise ValueError("exponents must be nonnegative with "
                                 f"shape ({self.j}, 3)")
            if expo.sum() > MAX_DEGREE:
                raise ValueError(
                    f"total degree {expo.sum()} exceeds {MAX_DEGREE}")
            norm.append((float(coeff), expo))
        object.__setattr__(self, "terms", tuple(norm))

    def _monomial(self, coords, expo):
        return np.prod(coords ** expo, axis=(-2, -1))

    def value(self, coords):
        coords = self._check(coords)
        out = np.zeros(coords.shape[:-2])
        for coeff, expo in self.terms:
            out += coeff * self._monomial(coords, expo)
        return out

    def grad(self, coords):
        coords = self._check(coords)
        out = np.zeros(coords.shape)
        for coeff, expo in self.terms:
            for k in range(self.j):
                for d in range(3):
                    e = expo[k, d]
                    if e == 0:
                        continue
                    down = expo.copy()
                    down[k, d] -= 1
                    out[..., k, d] += coeff * e * self._monomial(coords, down)
        return out

    def hess(self, coords):
        coords = self._check(coords)
        out = np.zeros(coords.shape[:-2] + (self.j, 3, self.j, 3))
        for coeff, expo in self.terms:
            for k in range(self.j):
                for d in range(3):
                    e1 = expo[k, d]
                    if e1 == 0:
                        continue
                    down = expo.copy()
                    down[k, d] -= 1
                    for l in range(self.j):
                        for f in range(3):
                            e2 = down[l, f]
                            if e2 == 0:
                                continue
                            dd = down.copy()
                            dd[l, f] -= 1
                            out[..., k, d, l, f] += (
                                coeff * e1 * e2 * self._monomial(coords, dd))
        return out


def energy(j: int) -> Polynomial:
    """Sum of squared speeds over the first j slots."""
    terms = []
    for k in range(j):
        for d in range(3):
            expo = np.zeros((j, 3), dtype=np.int64)
            expo[k, d] = 2
            terms.append((1.0, expo))
    return Polynomial(j=j, terms=tuple(terms), label=f"energy[{j}]")


def fourth_moment(j: int) -> Polynomial:
    """Sum over the first j slots of the fourth power of the speed."""
    terms = []
    for k in range(j):
        # |v|^4 = sum_d v_d^4 + 2 sum_{d<f} v_d^2 v_f^2
        for d in range(3):
            expo = np.zeros((j, 3), dtype=np.int64)
            expo[k, d] = 4
            terms.append((1.0, expo))
        for d in range(3):
            for f in range(d + 1, 3):
                expo = np.zeros((j, 3), dtype=np.int64)
                expo[k, d] = 2
                expo[k, f] = 2
                terms.append((2.0, expo))
    return Polynomial(j=j, terms=tuple(terms), label=f"fourth_moment[{j}]")


class _RadialProduct(TestFunction):
    """Product over slots of radial profiles q(|v_k - a_k|^2 / scale^2).

    Subclasses supply q, q', q'' of the squared-radius argument; the
    chain rule below assembles gradients and Hessians of the product.
    """

    def __init__(self, centers, scale: float, label: str = ""):
        centers = np.asarray(centers, dtype=np.float64)
        if centers.ndim != 2 or centers.shape[1] != 3:
            raise ValueError("centers must have shape (j, 3)")
        if scale <= 0:
            raise ValueError("scale must be positive")
        self.centers = centers
        self.scale = float(scale)
        self.j = centers.shape[0]
        self.label = label

    def _profile(self, u):
        """Return q(u), q'(u), q''(u) for u = squared radius / scale^2."""
        raise NotImplementedError

    def _slot_data(self, coords):
        x = (coords - self.centers) / self.scale
        u = np.einsum("...kd,...kd->...k", x, x)
        q, dq, ddq = self._profile(u)
        return x, q, dq, ddq

    def value(self, coords):
        coords = self._check(coords)
        _, q, _, _ = self._slot_data(coords)
        return np.prod(q, axis=-1)

    def grad(self, coords):
        coords = self._check(coords)
        x, q, dq, _ = self._slot_data(coords)
        # others[..., k] = product of q over slots != k, safe at zeros
        others = self._leave_one_out(q)
        g = (2.0 / self.scale) * dq[..., None] * x
        return others[..., None] * g

    def hess(self, coords):
        coords = self._check(coords)
        x, q, dq, ddq = self._slot_data(coords)
        others = self._leave_one_out(q)
        j = self.j
        out = np.zeros(coords.shape[:-2] + (j, 3, j, 3))
        eye = np.eye(3)
        s2 = self.scale ** 2
        slot_grad = (2.0 / self.scale) * dq[..., None] * x
        for k in range(j):
            xk = x[..., k, :]
            hkk = (4.0 / s2) * ddq[..., k, None, None] * (
                xk[..., :, None] * xk[..., None, :]) \
                + (2.0 / s2) * dq[..., k, None, None] * eye
            out[..., k, :, k, :] = others[..., k, None, None] * hkk
            for l in range(j):
                if l == k:
                    continue
                pair = self._leave_two_out(q, k, l)
                out[..., k, :, l, :] = pair[..., None, None] * (
                    slot_grad[..., k, :, None] * slot_grad[..., l, None, :])
        return out

    def _leave_one_out(self, q):
        j = self.j
        out = np.empty(q.shape)
        for k in range(j):
            idx = [m for m in range(j) if m != k]
            out[..., k] = np.prod(q[..., idx], axis=-1) if idx else 1.0
        return out

    def _leave_two_out(self, q, k, l):
        idx = [m for m in range(self.j) if m not in (k, l)]
        if not idx:
            return np.ones(q.shape[:-1])
        return np.prod(q[..., idx], axis=-1)


class GaussianBump(_RadialProduct):
    """exp(-sum_k |v_k - a_k|^2 / (2 scale^2)), everywhere smooth."""

    def _profile(self, u):
        q = np.exp(-0.5 * u)
        return q, -0.5 * q, 0.25 * q


class SmoothBump(_RadialProduct):
    """Compactly supported bump (1 - u)^4 inside the unit ball of u.

    C^3 across the support boundary, enough regularity for any
    second-order generator.
    """

    def _profile(self, u):
        inside = u < 1.0
        w = np.where(inside, 1.0 - u, 0.0)
        q = w ** 4
        dq = np.where(inside, -4.0 * w ** 3, 0.0)
        ddq = np.where(inside, 12.0 * w ** 2, 0.0)
        return q, dq, ddq

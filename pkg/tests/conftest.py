"""Shared helpers: finite differences and seeded generators."""

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20260814)


def central_grad(f, x, h=1e-6):
    """Central finite-difference gradient of scalar f at flat array x."""
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros(x.size)
    flat = x.ravel()
    for i in range(flat.size):
        xp = flat.copy(); xp[i] += h
        xm = flat.copy(); xm[i] -= h
        out[i] = (f(xp.reshape(x.shape)) - f(xm.reshape(x.shape))) / (2 * h)
    return out.reshape(x.shape)


def central_jacobian(f, x, h=1e-6):
    """Jacobian of vector-valued f (output flattened) at flat array x."""
    x = np.asarray(x, dtype=np.float64)
    f0 = np.asarray(f(x)).ravel()
    out = np.zeros((f0.size, x.size))
    flat = x.ravel()
    for i in range(flat.size):
        xp = flat.copy(); xp[i] += h
        xm = flat.copy(); xm[i] -= h
        out[:, i] = (np.asarray(f(xp.reshape(x.shape))).ravel()
                     - np.asarray(f(xm.reshape(x.shape))).ravel()) / (2 * h)
    return out

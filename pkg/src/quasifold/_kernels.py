"""Float kernels for batch sampling.

Each kernel has a numba ``@njit`` version and a pure numpy version with the
same signature. The numba path is used when numba imports and the
``QUASIFOLD_DISABLE_NUMBA`` environment variable is unset (or ``0``).
"""
from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and os.environ.get("QUASIFOLD_DISABLE_NUMBA", "0").lower() in ("", "0", "false", "no")


# -- pure numpy ---------------------------------------------------------------


def halfspace_slack_numpy(points, normals, offsets):
    return points @ normals.T - offsets


def level_residual_numpy(moduli, basis, offsets):
    if basis.shape[0] == 0:
        return np.zeros(moduli.shape[0])
    return np.abs((moduli + offsets) @ basis.T).max(axis=1)


def solve_moments_numpy(moduli, offsets, normals, solve_idx, solve_inv):
    rhs = moduli[:, solve_idx] + offsets[solve_idx]
    mu = rhs @ solve_inv.T
    resid = np.abs(mu @ normals.T - (moduli + offsets)).max(axis=1)
    return mu, resid


def sup_distance_numpy(samples, targets):
    out = np.full(targets.shape[0], np.inf)
    if samples.shape[0] == 0:
        return out
    for t in range(targets.shape[0]):
        out[t] = np.abs(samples - targets[t]).max(axis=1).min()
    return out


# -- numba --------------------------------------------------------------------

if HAVE_NUMBA:

    @numba.njit(cache=True, nogil=True)
    def halfspace_slack_numba(points, normals, offsets):
        N, n = points.shape
        d = normals.shape[0]
        out = np.empty((N, d))
        for i in range(N):
            for j in range(d):
                s = 0.0
                for k in range(n):
                    s += points[i, k] * normals[j, k]
                out[i, j] = s - offsets[j]
        return out

    @numba.njit(cache=True, nogil=True)
    def level_residual_numba(moduli, basis, offsets):
        N, d = moduli.shape
        out = np.zeros(N)
        for i in range(N):
            worst = 0.0
            for a in range(basis.shape[0]):
                s = 0.0
                for j in range(d):
                    s += basis[a, j] * (moduli[i, j] + offsets[j])
                if abs(s) > worst:
                    worst = abs(s)
            out[i] = worst
        return out

    @numba.njit(cache=True, nogil=True)
    def solve_moments_numba(moduli, offsets, normals, solve_idx, solve_inv):
        N, d = moduli.shape
        n = solve_inv.shape[0]
        mu = np.empty((N, n))
        resid = np.empty(N)
        rhs = np.empty(n)
        for i in range(N):
            for k in range(n):
                j = solve_idx[k]
                rhs[k] = moduli[i, j] + offsets[j]
            for a in range(n):
                s = 0.0
                for k in range(n):
                    s += solve_inv[a, k] * rhs[k]
                mu[i, a] = s
            worst = 0.0
            for j in range(d):
                s = 0.0
                for k in range(n):
                    s += mu[i, k] * normals[j, k]
                r = abs(s - (moduli[i, j] + offsets[j]))
                if r > worst:
                    worst = r
            resid[i] = worst
        return mu, resid

    @numba.njit(cache=True, nogil=True)
    def sup_distance_numba(samples, targets):
        T, n = targets.shape
        out = np.full(T, np.inf)
        for t in range(T):
            best = np.inf
            for i in range(samples.shape[0]):
                dist = 0.0
                for k in range(n):
                    v = abs(samples[i, k] - targets[t, k])
                    if v > dist:
                        dist = v
                if dist < best:
                    best = dist
            out[t] = best
        return out


def _pick(name):
    if USE_NUMBA:
        return globals()[f"{name}_numba"]
    return globals()[f"{name}_numpy"]


halfspace_slack = _pick("halfspace_slack")
level_residual = _pick("level_residual")
solve_moments = _pick("solve_moments")
sup_distance = _pick("sup_distance")

BACKEND = "numba" if USE_NUMBA else "numpy"

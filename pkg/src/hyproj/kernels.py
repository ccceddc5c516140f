"""Hot array kernels with numba and pure-numpy implementations.

Every kernel exists twice: ``<name>_numpy`` (vectorised numpy) and
``<name>_numba`` (``@njit`` loops). The public ``<name>`` is bound at import
time according to :mod:`hyproj._backend`. Both paths agree to rounding for the
float kernels and exactly for the integer ones.

Array conventions: point sets are ``(N, n)`` float64 C-contiguous arrays in
Poincare-ball coordinates unless a name says otherwise.
"""
import math

import numpy as np

from ._backend import USE_NUMBA, jit

__all__ = [
    "psi_rows",
    "psi_inv_rows",
    "poincare_dist_pairs",
    "poincare_dist_from",
    "project_coords",
    "cell_keys",
    "count_cells",
    "orbit",
]


# -- model conversion -------------------------------------------------------


def psi_rows_numpy(x):
    r2 = np.einsum("ij,ij->i", x, x)
    return x * (2.0 / (1.0 + r2))[:, None]


@jit
def psi_rows_numba(x):
    n_pts, dim = x.shape
    out = np.empty_like(x)
    for i in range(n_pts):
        r2 = 0.0
        for j in range(dim):
            r2 += x[i, j] * x[i, j]
        f = 2.0 / (1.0 + r2)
        for j in range(dim):
            out[i, j] = f * x[i, j]
    return out


def psi_inv_rows_numpy(y):
    r2 = np.einsum("ij,ij->i", y, y)
    return y * (1.0 / (1.0 + np.sqrt(np.maximum(1.0 - r2, 0.0))))[:, None]


@jit
def psi_inv_rows_numba(y):
    n_pts, dim = y.shape
    out = np.empty_like(y)
    for i in range(n_pts):
        r2 = 0.0
        for j in range(dim):
            r2 += y[i, j] * y[i, j]
        f = 1.0 / (1.0 + math.sqrt(max(1.0 - r2, 0.0)))
        for j in range(dim):
            out[i, j] = f * y[i, j]
    return out


# -- distances ---------------------------------------------------------------
# d = 2 asinh(|x - y| / sqrt((1 - |x|^2)(1 - |y|^2))), algebraically equal to
# 2 atanh(|x - y| / sqrt(1 - 2<x,y> + |x|^2 |y|^2) but without the
# cancellation atanh suffers as its argument approaches 1.


def poincare_dist_pairs_numpy(x, y):
    diff = x - y
    num = np.sqrt(np.einsum("ij,ij->i", diff, diff))
    cx = 1.0 - np.einsum("ij,ij->i", x, x)
    cy = 1.0 - np.einsum("ij,ij->i", y, y)
    return 2.0 * np.arcsinh(num / np.sqrt(cx * cy))


@jit
def poincare_dist_pairs_numba(x, y):
    n_pts, dim = x.shape
    out = np.empty(n_pts)
    for i in range(n_pts):
        d2 = 0.0
        rx = 0.0
        ry = 0.0
        for j in range(dim):
            t = x[i, j] - y[i, j]
            d2 += t * t
            rx += x[i, j] * x[i, j]
            ry += y[i, j] * y[i, j]
        out[i] = 2.0 * math.asinh(math.sqrt(d2) / math.sqrt((1.0 - rx) * (1.0 - ry)))
    return out


def poincare_dist_from_numpy(x, q):
    diff = q - x[None, :]
    num = np.sqrt(np.einsum("ij,ij->i", diff, diff))
    cx = 1.0 - float(x @ x)
    cq = 1.0 - np.einsum("ij,ij->i", q, q)
    return 2.0 * np.arcsinh(num / np.sqrt(cx * cq))


@jit
def poincare_dist_from_numba(x, q):
    n_pts, dim = q.shape
    rx = 0.0
    for j in range(dim):
        rx += x[j] * x[j]
    out = np.empty(n_pts)
    for i in range(n_pts):
        d2 = 0.0
        rq = 0.0
        for j in range(dim):
            t = q[i, j] - x[j]
            d2 += t * t
            rq += q[i, j] * q[i, j]
        out[i] = 2.0 * math.asinh(math.sqrt(d2) / math.sqrt((1.0 - rx) * (1.0 - rq)))
    return out


# -- hyperbolic projection ----------------------------------------------------


def project_coords_numpy(x, basis):
    """Intrinsic coordinates ``B^T P(x)`` of the hyperbolic feet of ``x`` on span(B).

    Conjugation: Klein image, Euclidean projection, back to Poincare. The
    inverse map is radial, so it can act on the m plane coordinates directly.
    """
    klein = psi_rows_numpy(x)
    u = klein @ basis
    return psi_inv_rows_numpy(np.ascontiguousarray(u))


@jit
def project_coords_numba(x, basis):
    n_pts, dim = x.shape
    m = basis.shape[1]
    out = np.empty((n_pts, m))
    for i in range(n_pts):
        r2 = 0.0
        for j in range(dim):
            r2 += x[i, j] * x[i, j]
        f = 2.0 / (1.0 + r2)
        s2 = 0.0
        for k in range(m):
            acc = 0.0
            for j in range(dim):
                acc += x[i, j] * basis[j, k]
            acc *= f
            out[i, k] = acc
            s2 += acc * acc
        g = 1.0 / (1.0 + math.sqrt(max(1.0 - s2, 0.0)))
        for k in range(m):
            out[i, k] *= g
    return out


# -- box counting ---------------------------------------------------------------
# Points within CELL_SNAP cell widths below a grid line go to the upper cell, so
# values that are exact multiples of delta in exact arithmetic land in the
# cell the half-open convention assigns them despite rounding.
CELL_SNAP = 1e-9


def cell_keys_numpy(u, delta, offset):
    """Grid cell indices ``floor((u - offset) / delta)`` as an ``(N, m)`` int64 array."""
    return np.floor((u - offset[None, :]) / delta + CELL_SNAP).astype(np.int64)


@jit
def cell_keys_numba(u, delta, offset):
    n_pts, m = u.shape
    out = np.empty((n_pts, m), dtype=np.int64)
    for i in range(n_pts):
        for k in range(m):
            out[i, k] = np.int64(math.floor((u[i, k] - offset[k]) / delta + CELL_SNAP))
    return out


def _linear_keys_numpy(idx):
    lo = idx.min(axis=0)
    span = idx.max(axis=0) - lo + 1
    if float(np.prod(span.astype(np.float64))) >= 2.0**62:
        return None
    keys = np.zeros(idx.shape[0], dtype=np.int64)
    for k in range(idx.shape[1]):
        keys = keys * span[k] + (idx[:, k] - lo[k])
    return keys


def count_cells_numpy(u, delta, offset):
    idx = cell_keys_numpy(u, delta, offset)
    keys = _linear_keys_numpy(idx)
    if keys is None:
        return int(np.unique(idx, axis=0).shape[0])
    return int(np.unique(keys).size)


@jit
def _count_cells_numba(u, delta, offset):
    idx = cell_keys_numba(u, delta, offset)
    n_pts, m = idx.shape
    lo = idx[0].copy()
    hi = idx[0].copy()
    for i in range(n_pts):
        for k in range(m):
            if idx[i, k] < lo[k]:
                lo[k] = idx[i, k]
            if idx[i, k] > hi[k]:
                hi[k] = idx[i, k]
    total = 1.0
    for k in range(m):
        total *= float(hi[k] - lo[k] + 1)
    if total >= 2.0**62:
        return -1
    keys = np.zeros(n_pts, dtype=np.int64)
    for i in range(n_pts):
        acc = np.int64(0)
        for k in range(m):
            acc = acc * (hi[k] - lo[k] + 1) + (idx[i, k] - lo[k])
        keys[i] = acc
    keys.sort()
    count = 1
    for i in range(1, n_pts):
        if keys[i] != keys[i - 1]:
            count += 1
    return count


def count_cells_numba(u, delta, offset):
    count = _count_cells_numba(u, delta, offset)
    if count < 0:
        return int(np.unique(cell_keys_numba(u, delta, offset), axis=0).shape[0])
    return int(count)


# -- chaos game -----------------------------------------------------------------


def orbit_numpy(choices, ratios, rotations, translations, x0):
    """Orbit ``x_{t+1} = r_c R_c x_t + t_c`` for the map sequence ``choices``."""
    out = np.empty((choices.size, x0.size))
    x = x0.copy()
    for t, c in enumerate(choices):
        x = ratios[c] * (rotations[c] @ x) + translations[c]
        out[t] = x
    return out


@jit
def orbit_numba(choices, ratios, rotations, translations, x0):
    steps = choices.size
    dim = x0.size
    out = np.empty((steps, dim))
    x = x0.copy()
    y = np.empty(dim)
    for t in range(steps):
        c = choices[t]
        for a in range(dim):
            acc = 0.0
            for b in range(dim):
                acc += rotations[c, a, b] * x[b]
            y[a] = ratios[c] * acc + translations[c, a]
        for a in range(dim):
            x[a] = y[a]
            out[t, a] = y[a]
    return out


if USE_NUMBA:
    psi_rows = psi_rows_numba
    psi_inv_rows = psi_inv_rows_numba
    poincare_dist_pairs = poincare_dist_pairs_numba
    poincare_dist_from = poincare_dist_from_numba
    project_coords = project_coords_numba
    cell_keys = cell_keys_numba
    count_cells = count_cells_numba
    orbit = orbit_numba
else:
    psi_rows = psi_rows_numpy
    psi_inv_rows = psi_inv_rows_numpy
    poincare_dist_pairs = poincare_dist_pairs_numpy
    poincare_dist_from = poincare_dist_from_numpy
    project_coords = project_coords_numpy
    cell_keys = cell_keys_numpy
    count_cells = count_cells_numpy
    orbit = orbit_numpy

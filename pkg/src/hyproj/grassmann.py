"""Linear m-planes of R^n: sampling, Euclidean projection, diagnostics."""
from dataclasses import dataclass

import numpy as np

from .errors import UsageError

ORTHONORMAL_TOL = 1e-12
IN_PLANE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class MPlane:
    """Span of the orthonormal columns of ``basis`` (shape ``(n, m)``, ``1 <= m < n``)."""

    basis: np.ndarray

    def __post_init__(self):
        b = np.array(self.basis, dtype=np.float64)
        if b.ndim != 2:
            raise UsageError(f"plane basis must be a 2-d array, got shape {b.shape}")
        n, m = b.shape
        if not 1 <= m < n:
            raise UsageError(f"need 1 <= m < n, got n={n}, m={m}")
        dev = np.max(np.abs(b.T @ b - np.eye(m)))
        if dev >= ORTHONORMAL_TOL:
            raise UsageError(f"basis columns are not orthonormal (max deviation {dev:.3e})")
        b = np.ascontiguousarray(b)
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @property
    def n(self):
        return self.basis.shape[0]

    @property
    def m(self):
        return self.basis.shape[1]

    @property
    def projector(self):
        return self.basis @ self.basis.T

    def __repr__(self):
        return f"MPlane(n={self.n}, m={self.m})"


def _orthonormalize(a):
    q, r = np.linalg.qr(a)
    signs = np.where(np.diag(r) < 0.0, -1.0, 1.0)
    return q * signs[None, :]


def plane_from_vectors(vectors):
    """Plane spanned by the columns of ``vectors`` (must be linearly independent)."""
    a = np.asarray(vectors, dtype=np.float64)
    if a.ndim == 1:
        a = a[:, None]
    if np.linalg.matrix_rank(a) < a.shape[1]:
        raise UsageError("spanning vectors are linearly dependent")
    return MPlane(_orthonormalize(a))


def coordinate_plane(n, m):
    """span(e_1, ..., e_m)."""
    return MPlane(np.eye(n)[:, :m])


def orthogonal_complement_basis(plane):
    """Orthonormal ``(n, n - m)`` basis of the complement of ``plane``."""
    q, _ = np.linalg.qr(plane.basis, mode="complete")
    return q[:, plane.m :]


def plane_seed(master_seed, index):
    """Per-task seed: ``SeedSequence(master_seed, spawn_key=(index,))``, first 32-bit word.

    Depends only on ``(master_seed, index)``, so tasks may run in any order.
    """
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(int(index),))
    return int(ss.generate_state(1)[0])


def sample_haar(n, m, rng):
    """Draw a plane from the rotation-invariant probability measure on G(n, m).

    Gaussian ``n x m`` matrix, QR with a nonnegative diagonal in R, keep Q.
    """
    if not (isinstance(n, (int, np.integer)) and isinstance(m, (int, np.integer))) or not 1 <= m < n:
        raise UsageError(f"need integers 1 <= m < n, got n={n!r}, m={m!r}")
    g = rng.standard_normal((int(n), int(m)))
    return MPlane(_orthonormalize(g))


def _check_vector(plane, x):
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != plane.n:
        raise UsageError(f"dimension mismatch: plane in R^{plane.n}, vector has {x.shape[-1]} entries")
    return x


def euclid_project(plane, x):
    """Orthogonal projection ``B B^T x``; rows of a 2-d ``x`` are projected independently."""
    x = _check_vector(plane, x)
    return (x @ plane.basis) @ plane.basis.T


def coords_in_plane(plane, q, tol=IN_PLANE_TOL):
    """Intrinsic coordinates ``B^T q`` of a point lying on the plane."""
    q = _check_vector(plane, q)
    u = q @ plane.basis
    off = np.max(np.linalg.norm(np.atleast_2d(q - u @ plane.basis.T), axis=1))
    if off > tol:
        raise UsageError(f"point is {off:.3e} away from the plane (tolerance {tol})")
    return u


def embed(plane, u):
    u = np.asarray(u, dtype=np.float64)
    if u.shape[-1] != plane.m:
        raise UsageError(f"expected {plane.m} plane coordinates, got {u.shape[-1]}")
    return u @ plane.basis.T


def principal_angles(v, w):
    """Principal angles between two planes, largest first, in ``[0, pi/2]``.

    Cosines come from the singular values of ``B_v^T B_w``. Below 45 degrees
    arccos loses half the digits, so those angles are taken from the sines
    (singular values of the part of ``B_w`` orthogonal to ``v``) instead.
    """
    if v.basis.shape != w.basis.shape:
        raise UsageError(f"planes differ in shape: {v.basis.shape} vs {w.basis.shape}")
    cos = np.clip(np.linalg.svd(v.basis.T @ w.basis, compute_uv=False), 0.0, 1.0)
    residual = w.basis - v.basis @ (v.basis.T @ w.basis)
    sin = np.clip(np.sort(np.linalg.svd(residual, compute_uv=False)), 0.0, 1.0)
    # cos is descending and sin ascending, so index i is the same angle in both
    angles = np.where(cos > np.sqrt(0.5), np.arcsin(sin), np.arccos(cos))
    return np.sort(angles)[::-1]

"""Closest-point projection of the Poincare ball onto hyperbolic m-planes through 0.

The production path conjugates the Euclidean projection by the Klein map:
``P_V = psi^-1 . (B B^T) . psi``. :func:`oracle_project` reaches the same
point by direct minimisation and shares none of that machinery.
"""
import math

import numpy as np

from . import kernels
from .errors import NumericalError, UsageError
from .grassmann import IN_PLANE_TOL
from .hypgeo import STANDARD, Point, as_point, initial_direction, poincare_distance

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_ORACLE_RADIUS = 1.0 - 1e-9


def _check(plane, x):
    x = as_point(x)
    if x.n != plane.n:
        raise UsageError(f"dimension mismatch: plane in R^{plane.n}, point in R^{x.n}")
    return x


def hyp_project(plane, x, conv=STANDARD):
    """Foot of the perpendicular from ``x`` to ``plane`` in the Poincare metric."""
    x = _check(plane, x)
    return Point(project_cloud(plane, x.coords[None, :], conv)[0])


def project_cloud(plane, points, conv=STANDARD):
    """Row-wise :func:`hyp_project` returning ambient ``(N, n)`` coordinates."""
    pts = np.ascontiguousarray(points, dtype=np.float64)
    if conv is STANDARD:
        return project_coords(plane, pts) @ plane.basis.T
    klein = conv.forward_rows(pts)
    flat = np.ascontiguousarray((klein @ plane.basis) @ plane.basis.T)
    return conv.inverse_rows(flat)


def project_coords(plane, points):
    """Intrinsic plane coordinates ``B^T P_V(x)`` of the feet, shape ``(N, m)``."""
    pts = np.ascontiguousarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != plane.n:
        raise UsageError(f"expected an (N, {plane.n}) array, got shape {pts.shape}")
    return kernels.project_coords(pts, plane.basis)


# -- independent minimisation oracle -------------------------------------------------


class _Objective:
    """``g(u) = |x - B u|^2 / (1 - |u|^2)`` split as ``(|x_perp|^2 + |B^T x - u|^2) / (1 - |u|^2)``.

    ``d(x, B u) = 2 asinh(sqrt(g(u) / (1 - |x|^2)))`` is increasing in ``g``, so
    both have the same minimiser; the split form avoids cancellation.
    Sublevel sets of ``g`` are Euclidean discs (hyperbolic balls are Euclidean
    balls in this model), so ``g`` is unimodal along every line.
    """

    def __init__(self, plane, x, max_evals):
        self.xu = [float(v) for v in plane.basis.T @ x]
        xperp = x - plane.basis @ (plane.basis.T @ x)
        self.perp2 = float(xperp @ xperp)
        self.evals = 0
        self.max_evals = max_evals

    def __call__(self, u):
        self.evals += 1
        if self.evals > self.max_evals:
            raise NumericalError(
                "oracle_project exceeded its evaluation cap",
                evals=self.evals - 1,
                u=list(u),
            )
        r2 = 0.0
        off = 0.0
        for ui, xi in zip(u, self.xu):
            r2 += ui * ui
            off += (xi - ui) * (xi - ui)
        if r2 >= _ORACLE_RADIUS * _ORACLE_RADIUS:
            return math.inf
        return (self.perp2 + off) / (1.0 - r2)


def _golden_line(obj, u, f_u, d):
    """Minimise ``obj(u + s d)`` over the chord of the disc; returns the new point and value."""
    ud = sum(a * b for a, b in zip(u, d))
    uu = sum(a * a for a in u)
    disc = ud * ud - (uu - _ORACLE_RADIUS * _ORACLE_RADIUS)
    if disc <= 0.0:
        return u, f_u
    root = math.sqrt(disc)
    lo, hi = -ud - root, -ud + root

    def at(s):
        return [a + s * b for a, b in zip(u, d)]

    s1 = hi - _GOLDEN * (hi - lo)
    s2 = lo + _GOLDEN * (hi - lo)
    f1, f2 = obj(at(s1)), obj(at(s2))
    while hi - lo > 1e-15 * (1.0 + abs(lo) + abs(hi)):
        if f1 <= f2:
            hi, s2, f2 = s2, s1, f1
            s1 = hi - _GOLDEN * (hi - lo)
            f1 = obj(at(s1))
        else:
            lo, s1, f1 = s1, s2, f2
            s2 = lo + _GOLDEN * (hi - lo)
            f2 = obj(at(s2))
        if s1 >= s2:
            break
    s, f_s = (s1, f1) if f1 <= f2 else (s2, f2)
    if f_s < f_u:
        return at(s), f_s
    return u, f_u


def _powell(obj, u, f_u):
    m = len(u)
    dirs = [[1.0 if i == j else 0.0 for j in range(m)] for i in range(m)]
    while True:
        start, f_start = u, f_u
        for d in dirs:
            u, f_u = _golden_line(obj, u, f_u, d)
        step = [a - b for a, b in zip(u, start)]
        norm = math.sqrt(sum(s * s for s in step))
        if not f_u < f_start or norm == 0.0:
            return u, f_u
        if m > 1:
            d = [s / norm for s in step]
            u, f_u = _golden_line(obj, u, f_u, d)
            dirs = dirs[1:] + [d]


def oracle_project(plane, x, tol=1e-10, max_evals=10_000):
    """Closest point of ``plane`` to ``x`` by derivative-free descent.

    Powell's conjugate-direction method with golden-section line searches,
    restarted from the coordinate directions until a restart makes no
    progress. Raises :class:`NumericalError` after ``max_evals`` objective
    evaluations.
    """
    if tol <= 0:
        raise UsageError("tol must be positive")
    x = _check(plane, x)
    obj = _Objective(plane, x.coords, max_evals)
    u = [0.0] * plane.m
    f_u = obj(u)
    while True:
        f_prev = f_u
        u, f_u = _powell(obj, u, f_u)
        # g and the distance are related monotonically; compare in distance units
        cx = 1.0 - float(x.coords @ x.coords)
        gain = 2.0 * (math.asinh(math.sqrt(f_prev / cx)) - math.asinh(math.sqrt(f_u / cx)))
        if gain <= tol:
            break
    return Point(np.asarray(u) @ plane.basis.T)


# -- orthogonality -------------------------------------------------------------------


def plane_angle(plane, q, x):
    """Angle at ``q`` (on the plane) between the geodesic towards ``x`` and the plane.

    The disc V n D^n is flat, so its tangent space at ``q`` is V itself; the
    model is conformal, so the Euclidean angle is the hyperbolic one.
    """
    d = initial_direction(q, x)
    along = float(np.linalg.norm(plane.basis.T @ d))
    return math.acos(min(along, 1.0))


def foot_angle(plane, x, conv=STANDARD):
    """Angle between the plane and the geodesic from the foot of ``x`` back to ``x``."""
    x = _check(plane, x)
    off = float(np.linalg.norm(x.coords - plane.basis @ (plane.basis.T @ x.coords)))
    if off < IN_PLANE_TOL:
        raise UsageError(f"point lies on the plane (distance {off:.3e}); foot angle undefined")
    return plane_angle(plane, hyp_project(plane, x, conv), x)


def projection_distance(plane, x):
    """Hyperbolic distance from ``x`` to the plane."""
    return poincare_distance(x, hyp_project(plane, x))

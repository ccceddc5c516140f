"""Poincare-ball model of hyperbolic n-space.

Points live in the open unit ball. ``psi`` sends the Poincare ball to the Klein
(projective) ball, where geodesics become straight chords. The conversion is
radial with profile ``r -> 2r / (1 + r^2)``; its inverse has profile
``r -> r / (1 + sqrt(1 - r^2))``.

A second convention, :data:`PRINTED`, swaps the two profiles. It exists only so
the verification suite can show that it does *not* straighten geodesics.
"""
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import kernels
from .errors import UsageError

BOUNDARY_GUARD = 1e-12


@dataclass(frozen=True, eq=False)
class Point:
    """A point of the open unit ball, ``n >= 2``.

    Construction rejects coordinates with Euclidean norm ``>= 1 - 1e-12``.
    The coordinate array is stored read-only.
    """

    coords: np.ndarray

    def __post_init__(self):
        c = np.array(self.coords, dtype=np.float64).reshape(-1)
        if c.size < 2:
            raise UsageError(f"points need n >= 2 coordinates, got {c.size}")
        if not np.all(np.isfinite(c)):
            raise UsageError("point coordinates must be finite")
        norm = float(np.linalg.norm(c))
        if norm >= 1.0 - BOUNDARY_GUARD:
            raise UsageError(f"point norm {norm!r} is not inside the unit ball (guard {BOUNDARY_GUARD})")
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    @property
    def n(self):
        return self.coords.size

    @property
    def norm(self):
        return float(np.linalg.norm(self.coords))

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.coords.copy() if copy else self.coords
        return self.coords.astype(dtype)

    def __repr__(self):
        return f"Point({np.array2string(self.coords, precision=6, separator=', ')})"


def as_point(x):
    return x if isinstance(x, Point) else Point(x)


def _pair(x, y):
    x, y = as_point(x), as_point(y)
    if x.n != y.n:
        raise UsageError(f"dimension mismatch: {x.n} vs {y.n}")
    return x, y


# -- radial conventions ---------------------------------------------------------


@dataclass(frozen=True)
class RadialConvention:
    """Radial map pair used to move between the Poincare and Klein balls.

    ``forward_rows`` plays the role of psi, ``inverse_rows`` its inverse; both
    act on ``(N, n)`` arrays.
    """

    name: str
    forward_rows: Callable = field(repr=False)
    inverse_rows: Callable = field(repr=False)


STANDARD = RadialConvention("standard", kernels.psi_rows, kernels.psi_inv_rows)
PRINTED = RadialConvention("printed", kernels.psi_inv_rows, kernels.psi_rows)


def convention(name):
    try:
        return {"standard": STANDARD, "printed": PRINTED}[name]
    except KeyError:
        raise UsageError(f"unknown radial convention {name!r}") from None


def psi(x, conv=STANDARD):
    """Poincare -> Klein. Fixes the origin and every direction."""
    x = as_point(x)
    return Point(conv.forward_rows(x.coords[None, :])[0])


def psi_inv(y, conv=STANDARD):
    """Klein -> Poincare."""
    y = as_point(y)
    return Point(conv.inverse_rows(y.coords[None, :])[0])


def psi_radius(r):
    return 2.0 * r / (1.0 + r * r)


def psi_inv_radius(r):
    return r / (1.0 + math.sqrt(max(1.0 - r * r, 0.0)))


# -- metrics --------------------------------------------------------------------


def poincare_distance(x, y):
    """Hyperbolic distance ``2 atanh(|x-y| / sqrt(1 - 2<x,y> + |x|^2 |y|^2))``."""
    x, y = _pair(x, y)
    return float(kernels.poincare_dist_pairs(x.coords[None, :], y.coords[None, :])[0])


def poincare_distance_printed(x, y):
    """Variant with denominator ``1 - 2<x,y> + |x|^2 + |y|^2``.

    Not a model of hyperbolic distance (``d(0, x) != 2 atanh|x|``); kept for
    the conformance test only.
    """
    x, y = _pair(x, y)
    a, b = x.coords, y.coords
    denom = 1.0 - 2.0 * float(a @ b) + float(a @ a) + float(b @ b)
    return 2.0 * math.atanh(float(np.linalg.norm(a - b)) / math.sqrt(denom))


def klein_distance(x, y, conv=STANDARD):
    """Distance between Klein-ball points, pulled back through the inverse map."""
    x, y = _pair(x, y)
    return poincare_distance(psi_inv(x, conv), psi_inv(y, conv))


# -- Mobius translations ------------------------------------------------------------


def mobius_add(a, b):
    """Mobius addition ``a (+) b``; ``z -> a (+) z`` is the isometry taking 0 to ``a``."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    ab = float(a @ b)
    aa = float(a @ a)
    bb = float(b @ b)
    num = (1.0 + 2.0 * ab + bb) * a + (1.0 - aa) * b
    return num / (1.0 + 2.0 * ab + aa * bb)


def initial_direction(x, y):
    """Euclidean unit tangent at ``x`` of the geodesic from ``x`` towards ``y``.

    The translation ``z -> x (+) z`` has derivative ``(1 - |x|^2) I`` at the
    origin, so the direction of ``(-x) (+) y`` is the answer.
    """
    x, y = _pair(x, y)
    w = mobius_add(-x.coords, y.coords)
    norm = float(np.linalg.norm(w))
    if norm == 0.0 or np.array_equal(x.coords, y.coords):
        raise UsageError("initial_direction needs two distinct points")
    return w / norm


def mobius_geodesic(a, b, ts):
    """Points of the geodesic from ``a`` to ``b`` at fractions ``ts`` of its length.

    Closed form via Mobius translation; independent of ``psi``.
    """
    a, b = _pair(a, b)
    w = mobius_add(-a.coords, b.coords)
    total = poincare_distance(a, b)
    w = w / np.linalg.norm(w)
    return np.array([mobius_add(a.coords, math.tanh(0.5 * t * total) * w) for t in np.atleast_1d(ts)])


# -- geodesics --------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Geodesic:
    """Geodesic segment between two distinct points, with its Klein chord cached."""

    a: Point
    b: Point
    klein_a: np.ndarray = field(init=False, repr=False)
    klein_b: np.ndarray = field(init=False, repr=False)
    ideal_endpoints: tuple = field(init=False, repr=False)

    def __post_init__(self):
        a, b = _pair(self.a, self.b)
        if np.array_equal(a.coords, b.coords):
            raise UsageError("geodesic endpoints must differ")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        ka = psi(a).coords
        kb = psi(b).coords
        object.__setattr__(self, "klein_a", ka)
        object.__setattr__(self, "klein_b", kb)
        # chord line ka + s (kb - ka) meets the unit sphere at the two roots
        d = kb - ka
        qa, qb, qc = float(d @ d), 2.0 * float(ka @ d), float(ka @ ka) - 1.0
        disc = math.sqrt(qb * qb - 4.0 * qa * qc)
        s_lo, s_hi = (-qb - disc) / (2.0 * qa), (-qb + disc) / (2.0 * qa)
        object.__setattr__(self, "ideal_endpoints", (ka + s_lo * d, ka + s_hi * d))

    @property
    def length(self):
        return poincare_distance(self.a, self.b)


def geodesic_point(g, t):
    """Point at fraction ``t`` of the hyperbolic length from ``g.a`` to ``g.b``.

    Bisects along the Klein chord; distance from ``a`` is monotone in the chord
    parameter.
    """
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise UsageError(f"geodesic parameter must lie in [0, 1], got {t}")
    if t == 0.0:
        return g.a
    if t == 1.0:
        return g.b
    target = t * g.length
    a = g.a.coords[None, :]
    chord = g.klein_b - g.klein_a
    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        p = kernels.psi_inv_rows((g.klein_a + mid * chord)[None, :])
        if kernels.poincare_dist_pairs(a, p)[0] < target:
            lo = mid
        else:
            hi = mid
    s = 0.5 * (lo + hi)
    return Point(kernels.psi_inv_rows((g.klein_a + s * chord)[None, :])[0])

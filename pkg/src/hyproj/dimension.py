"""Box counting on point clouds in plane coordinates.

The grid is anchored at the origin with half-open cells ``[k d, (k+1) d)``.
"""
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InsufficientScalesError, UsageError

MIN_COUNT = 8
MAX_FRACTION = 0.2
RANDOM_OFFSETS = 4


@dataclass(frozen=True)
class DimensionEstimate:
    slope: float
    r_squared: float
    scales_used: list
    counts: list


def _as_points(points):
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise UsageError(f"expected a nonempty (N, m) array, got shape {pts.shape}")
    return np.ascontiguousarray(pts)


def box_count(points, delta, offset=None):
    """Number of occupied grid cells of side ``delta``."""
    if delta <= 0:
        raise UsageError("delta must be positive")
    pts = _as_points(points)
    off = np.zeros(pts.shape[1]) if offset is None else np.asarray(offset, dtype=np.float64)
    return kernels.count_cells(pts, float(delta), off)


def _offset_count(pts, delta, offsets, rng):
    if offsets <= 1:
        return float(box_count(pts, delta))
    shifts = rng.uniform(0.0, delta, size=(offsets, pts.shape[1]))
    return float(np.mean([box_count(pts, delta, s) for s in shifts]))


def box_dimension(points, deltas, min_count=MIN_COUNT, max_fraction=MAX_FRACTION, offsets=1, seed=0):
    """Least-squares slope of ``log N(delta)`` against ``log(1/delta)``.

    A scale is used when ``min_count <= N(delta) <= max_fraction * len(points)``.
    With ``offsets > 1`` each count is averaged over that many random grid
    shifts drawn from ``seed``.
    """
    pts = _as_points(points)
    rng = np.random.default_rng(seed)
    limit = max_fraction * pts.shape[0]
    used, counts, rejected = [], [], []
    for d in sorted(float(x) for x in deltas):
        c = _offset_count(pts, d, offsets, rng)
        if min_count <= c <= limit:
            used.append(d)
            counts.append(c)
        else:
            rejected.append((d, c))
    if len(used) < 3:
        raise InsufficientScalesError(
            f"only {len(used)} usable scales (need 3)",
            rejected=rejected,
            min_count=min_count,
            max_count=limit,
        )
    x = np.log(1.0 / np.asarray(used))
    y = np.log(np.asarray(counts))
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    if offsets <= 1:
        counts = [int(c) for c in counts]
    return DimensionEstimate(float(slope), min(max(r2, 0.0), 1.0), used, counts)


def covering_measure(points, m, delta):
    """Grid pre-measure ``N(delta) * delta ** m``."""
    return box_count(points, delta) * float(delta) ** m


def central_window(points, fraction=0.5):
    """Box centred on the cloud's bounding box, each side ``fraction`` of the extent."""
    pts = _as_points(points)
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    center, half = 0.5 * (lo + hi), 0.5 * fraction * (hi - lo)
    return center - half, center + half


def interior_occupancy(points, delta, window):
    """Fraction of the grid cells lying wholly inside ``window`` that hold a point.

    ``window`` is ``(lo, hi)`` with one entry per coordinate.
    """
    pts = _as_points(points)
    lo = np.asarray(window[0], dtype=np.float64).reshape(-1)
    hi = np.asarray(window[1], dtype=np.float64).reshape(-1)
    if lo.size != pts.shape[1] or hi.size != pts.shape[1]:
        raise UsageError("window dimension does not match the points")
    if np.any(hi <= lo):
        raise UsageError("window must be nonempty")
    first = np.ceil(lo / delta).astype(np.int64)
    last = np.floor(hi / delta).astype(np.int64) - 1
    if np.any(last < first):
        raise UsageError(f"window holds no complete cell at delta={delta}")
    idx = kernels.cell_keys(pts, float(delta), np.zeros(pts.shape[1]))
    inside = np.all((idx >= first) & (idx <= last), axis=1)
    occupied = np.unique(idx[inside], axis=0).shape[0]
    total = int(np.prod(last - first + 1))
    return occupied / total

"""Projection sweeps over random planes, written as one flat CSV table.

Every sweep samples plane ``i`` from ``plane_seed(seed, i)``, so rows do not
depend on the order in which workers finish. Rows are sorted by
``(plane_id, cover_delta desc)`` before writing.

The thresholds quoted in summaries are harness calibrations: the underlying
theorems hold almost everywhere and give no rates.
"""
import json
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._backend import thread_count
from .dimension import box_dimension, central_window, covering_measure, interior_occupancy
from .errors import NumericalError, UsageError
from .fractals import embed_in_ball, four_corner, generate_depth, parse_source, segment, similarity_dimension
from .grassmann import coordinate_plane, plane_seed, principal_angles, sample_haar
from .projection import project_coords

BASE_COLUMNS = ["plane_id", "seed", "n", "m", "dim_est", "r2", "cover_delta", "cover_est", "occ_est"]
FOOTER = "thresholds are harness calibrations; the a.e. statements carry no quantitative rates"


@dataclass
class Row:
    plane_id: int
    seed: int
    n: int
    m: int
    dim_est: float = math.nan
    r2: float = math.nan
    cover_delta: float = math.nan
    cover_est: float = math.nan
    occ_est: float = math.nan
    angles: tuple = ()


def csv_columns(m):
    return BASE_COLUMNS + [f"pa_{i}" for i in range(1, m + 1)]


def _fmt(value):
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    return "" if math.isnan(value) else format(value, ".17g")


def format_csv(rows, m):
    rows = sorted(rows, key=lambda r: (r.plane_id, -_nan_to(r.cover_delta, math.inf)))
    lines = [",".join(csv_columns(m))]
    for r in rows:
        fields = [r.plane_id, r.seed, r.n, r.m, r.dim_est, r.r2, r.cover_delta, r.cover_est, r.occ_est]
        fields += list(r.angles)
        lines.append(",".join(_fmt(v) for v in fields))
    return "\n".join(lines) + "\n"


def _nan_to(value, default):
    return default if math.isnan(value) else value


def write_csv(rows, m, path):
    with open(path, "w", newline="\n") as fh:
        fh.write(format_csv(rows, m))


def read_csv(path):
    """Parse a sweep CSV into a list of dicts (blank fields become NaN)."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        out = []
        for line in fh:
            vals = line.rstrip("\n").split(",")
            rec = {}
            for key, v in zip(header, vals):
                if key in ("plane_id", "seed", "n", "m"):
                    rec[key] = int(v)
                else:
                    rec[key] = float(v) if v else math.nan
            out.append(rec)
    return out


def _map_planes(task, num_planes, threads):
    workers = thread_count() if threads is None else max(1, int(threads))
    if workers == 1:
        return [task(i) for i in range(num_planes)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(task, range(num_planes)))


def _plane(seed, index, n, m):
    s = plane_seed(seed, index)
    return s, sample_haar(n, m, np.random.default_rng(s))


def _quantiles(values):
    v = np.asarray([x for x in values if not math.isnan(x)])
    if v.size == 0:
        return math.nan, (math.nan, math.nan)
    q25, q50, q75 = np.percentile(v, [25, 50, 75])
    return float(q50), (float(q25), float(q75))


def resolve_cloud(spec, depth, radius=0.5):
    """Source spec -> (embedded cloud, dimension of the source set)."""
    kind, obj = parse_source(spec)
    if kind == "ifs":
        cloud = generate_depth(obj, depth)
        dim = similarity_dimension(obj)
    else:
        cloud, dim = obj, 1.0
    cloud.metadata["source_spec"] = spec
    return embed_in_ball(cloud, radius), dim


def parse_deltas(text):
    """``"2^-2..2^-10"`` (inclusive range of exponents) or a comma list of numbers."""
    text = text.strip()
    try:
        if ".." in text:
            left, right = text.split("..")
            base_l, exp_l = left.split("^")
            base_r, exp_r = right.split("^")
            if float(base_l) != float(base_r):
                raise ValueError("range ends use different bases")
            lo, hi = int(exp_l), int(exp_r)
            step = 1 if hi >= lo else -1
            return [float(base_l) ** e for e in range(lo, hi + step, step)]
        out = []
        for part in text.split(","):
            if "^" in part:
                b, e = part.split("^")
                out.append(float(b) ** int(e))
            else:
                out.append(float(part))
        return out
    except ValueError as exc:
        raise UsageError(f"cannot parse delta list {text!r}: {exc}") from exc


# -- Marstrand sweep -----------------------------------------------------------------


DEFAULT_MARSTRAND_DELTAS = [2.0**-j for j in range(2, 11)]


def run_marstrand(spec, m, depth, num_planes, seed, deltas=None, n=None, radius=0.5,
                  min_count=8, max_fraction=0.2, offsets=1, threads=None):
    """Box dimension and covering measure of projections onto ``num_planes`` Haar m-planes."""
    deltas = sorted(DEFAULT_MARSTRAND_DELTAS if deltas is None else deltas, reverse=True)
    cloud, source_dim = resolve_cloud(spec, depth, radius)
    if n is not None and n != cloud.n:
        raise UsageError(f"--n {n} does not match the source dimension {cloud.n}")
    n = cloud.n
    if not 1 <= m < n:
        raise UsageError(f"need 1 <= m < n, got n={n}, m={m}")
    pts = cloud.points
    ref = coordinate_plane(n, m)
    fine = deltas[-1]

    def task(i):
        s, plane = _plane(seed, i, n, m)
        u = project_coords(plane, pts)
        row = Row(i, s, n, m, cover_delta=fine, angles=tuple(principal_angles(plane, ref)))
        try:
            est = box_dimension(u, deltas, min_count, max_fraction, offsets, seed=s)
            row.dim_est, row.r2 = est.slope, est.r_squared
        except NumericalError:
            pass
        row.cover_est = covering_measure(u, m, fine)
        try:
            row.occ_est = interior_occupancy(u, fine, central_window(u))
        except UsageError:
            pass
        return row

    rows = _map_planes(task, num_planes, threads)
    if rows and all(math.isnan(r.dim_est) for r in rows):
        raise NumericalError(
            "no plane produced three usable box-counting scales",
            deltas=deltas,
            min_count=min_count,
            max_count=max_fraction * len(cloud),
        )
    truth = min(m, source_dim)
    med, iqr = _quantiles([r.dim_est for r in rows])
    cover_med, _ = _quantiles([r.cover_est for r in rows])
    summary = {
        "experiment": "marstrand",
        "source": spec,
        "n": n,
        "m": m,
        "depth": depth,
        "num_points": len(cloud),
        "num_planes": num_planes,
        "seed": seed,
        "deltas": deltas,
        "source_dimension": source_dim,
        "ground_truth": truth,
        "median_dim": med,
        "iqr_dim": list(iqr),
        "failed_fits": sum(math.isnan(r.dim_est) for r in rows),
        "cover_delta": fine,
        "median_cover": cover_med,
        "footer": FOOTER,
    }
    return rows, summary


# -- Besicovitch-Federer demo ----------------------------------------------------------


def run_besfed(generations=7, num_planes=40, seed=0, radius=0.5, lam=0.25, threads=None,
               decay_threshold=0.5, control_threshold=0.8, control_max_angle_deg=80.0):
    """Covering measure of projected four-corner generations against a segment control.

    Generation ``k`` is measured at ``delta = 4**-k`` for ``k = 3 .. generations``.
    The control segment is resampled with ``max(10**4, 4 * 4**k)`` points so
    its sample spacing stays below ``delta``.
    """
    if not 3 <= generations <= 8:
        raise UsageError("generations must lie in 3..8")
    ks = list(range(3, generations + 1))
    ifs = four_corner(lam)
    clouds = {k: embed_in_ball(generate_depth(ifs, k), radius).points for k in ks}
    controls = {k: embed_in_ball(segment(2, max(10_000, 4 * 4**k)), radius).points for k in ks}
    ref = coordinate_plane(2, 1)

    def task(i):
        s, plane = _plane(seed, i, 2, 1)
        angles = tuple(principal_angles(plane, ref))
        rows, ctrl = [], []
        for k in ks:
            delta = 4.0**-k
            rows.append(Row(i, s, 2, 1, cover_delta=delta,
                            cover_est=covering_measure(project_coords(plane, clouds[k]), 1, delta), angles=angles))
            ctrl.append(Row(i, s, 2, 1, cover_delta=delta,
                            cover_est=covering_measure(project_coords(plane, controls[k]), 1, delta), angles=angles))
        return rows, ctrl

    results = _map_planes(task, num_planes, threads)
    rows = [r for res in results for r in res[0]]
    control_rows = [r for res in results for r in res[1]]

    per_plane = []
    for fc, ctrl in results:
        angle = math.degrees(fc[0].angles[0])
        per_plane.append({
            "plane_id": fc[0].plane_id,
            "angle_to_e1_deg": angle,
            "decay_ratio": fc[-1].cover_est / fc[0].cover_est,
            "control_ratio": ctrl[-1].cover_est / ctrl[0].cover_est,
        })
    ratios = np.array([p["decay_ratio"] for p in per_plane])
    control_ok = [p["control_ratio"] for p in per_plane if p["angle_to_e1_deg"] < control_max_angle_deg]
    slowest = sorted(per_plane, key=lambda p: -p["decay_ratio"])[:5]
    summary = {
        "experiment": "besfed",
        "lambda": lam,
        "generations": ks,
        "num_planes": num_planes,
        "seed": seed,
        "median_decay_ratio": float(np.median(ratios)),
        "fraction_decay_below_threshold": float(np.mean(ratios < decay_threshold)),
        "decay_threshold": decay_threshold,
        "control_min_ratio": float(min(control_ok)) if control_ok else math.nan,
        "control_threshold": control_threshold,
        "control_lines_considered": len(control_ok),
        "slowest_decay_lines": slowest,
        "per_plane": per_plane,
        "footer": FOOTER,
    }
    return rows, control_rows, summary


# -- interior occupancy -------------------------------------------------------------


DEFAULT_INTERIOR_DELTAS = [2.0**-3, 2.0**-4, 2.0**-5]


def run_interior(spec, m, depth, num_planes, seed, deltas=None, n=None, radius=0.5,
                 window_fraction=0.5, threads=None, occupancy_threshold=0.9):
    """Occupancy of the central window of each projection at several scales."""
    deltas = sorted(DEFAULT_INTERIOR_DELTAS if deltas is None else deltas, reverse=True)
    cloud, source_dim = resolve_cloud(spec, depth, radius)
    if n is not None and n != cloud.n:
        raise UsageError(f"--n {n} does not match the source dimension {cloud.n}")
    n = cloud.n
    if not 1 <= m < n:
        raise UsageError(f"need 1 <= m < n, got n={n}, m={m}")
    below = source_dim <= 2 * m
    if below:
        warnings.warn(
            f"source dimension {source_dim:.4f} does not exceed 2m = {2 * m}; "
            "nonempty interior is not expected",
            stacklevel=2,
        )
    pts = cloud.points
    ref = coordinate_plane(n, m)

    def task(i):
        s, plane = _plane(seed, i, n, m)
        u = project_coords(plane, pts)
        window = central_window(u, window_fraction)
        angles = tuple(principal_angles(plane, ref))
        out = []
        for d in deltas:
            try:
                occ = interior_occupancy(u, d, window)
            except UsageError:
                occ = math.nan
            out.append(Row(i, s, n, m, cover_delta=d, cover_est=covering_measure(u, m, d), occ_est=occ, angles=angles))
        return out

    rows = [r for res in _map_planes(task, num_planes, threads) for r in res]
    by_delta = {}
    for d in deltas:
        occ = np.array([r.occ_est for r in rows if r.cover_delta == d])
        by_delta[format(d, ".17g")] = {
            "median_occupancy": float(np.nanmedian(occ)) if np.any(~np.isnan(occ)) else math.nan,
            "fraction_at_or_above_threshold": float(np.mean(occ >= occupancy_threshold)),
        }
    summary = {
        "experiment": "interior",
        "source": spec,
        "n": n,
        "m": m,
        "depth": depth,
        "num_planes": num_planes,
        "seed": seed,
        "source_dimension": source_dim,
        "dimension_exceeds_2m": not below,
        "occupancy_threshold": occupancy_threshold,
        "window_fraction": window_fraction,
        "by_delta": by_delta,
        "footer": FOOTER,
    }
    return rows, summary


def write_summary(summary, path):
    with open(path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"not JSON serialisable: {type(obj).__name__}")


__all__ = [
    "Row",
    "csv_columns",
    "format_csv",
    "parse_deltas",
    "read_csv",
    "resolve_cloud",
    "run_besfed",
    "run_interior",
    "run_marstrand",
    "write_csv",
    "write_summary",
]

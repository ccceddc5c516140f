"""Self-similar test sets: similarity IFSs, point clouds and their ball embeddings."""
import itertools
import json
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import UsageError

MAX_COMPOSITIONS = 10**7
BURN_IN = 100


@dataclass(frozen=True, eq=False)
class Similarity:
    """``x -> ratio * rotation @ x + translation``."""

    ratio: float
    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        ratio = float(self.ratio)
        if not 0.0 < ratio < 1.0:
            raise UsageError(f"similarity ratio must lie in (0, 1), got {ratio}")
        rot = np.array(self.rotation, dtype=np.float64)
        t = np.array(self.translation, dtype=np.float64).reshape(-1)
        if rot.shape != (t.size, t.size):
            raise UsageError(f"rotation shape {rot.shape} does not match translation length {t.size}")
        if np.max(np.abs(rot.T @ rot - np.eye(t.size))) >= 1e-12:
            raise UsageError("rotation matrix is not orthogonal")
        rot.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "ratio", ratio)
        object.__setattr__(self, "rotation", rot)
        object.__setattr__(self, "translation", t)

    @property
    def n(self):
        return self.translation.size

    def __call__(self, x):
        """Apply to a vector or to the rows of an ``(N, n)`` array."""
        x = np.asarray(x, dtype=np.float64)
        return self.ratio * (x @ self.rotation.T) + self.translation

    def fixed_point(self):
        return np.linalg.solve(np.eye(self.n) - self.ratio * self.rotation, self.translation)


@dataclass(frozen=True, eq=False)
class Ifs:
    """Iterated function system of at least two similarities on a common R^n.

    ``osc`` records the caller's assertion that the open set condition holds.
    """

    maps: tuple
    osc: bool = False

    def __post_init__(self):
        maps = tuple(self.maps)
        if len(maps) < 2:
            raise UsageError("an IFS needs at least two maps")
        dims = {f.n for f in maps}
        if len(dims) != 1:
            raise UsageError(f"maps act on different dimensions: {sorted(dims)}")
        object.__setattr__(self, "maps", maps)
        object.__setattr__(self, "osc", bool(self.osc))

    @property
    def n(self):
        return self.maps[0].n

    @property
    def ratios(self):
        return np.array([f.ratio for f in self.maps])

    def to_json(self):
        return json.dumps(
            {
                "n": self.n,
                "maps": [
                    {
                        "ratio": f.ratio,
                        "rotation": f.rotation.tolist(),
                        "translation": f.translation.tolist(),
                    }
                    for f in self.maps
                ],
                "osc": self.osc,
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, text):
        try:
            data = json.loads(text)
            n = int(data["n"])
            maps = []
            for entry in data["maps"]:
                rot = np.asarray(entry["rotation"], dtype=np.float64)
                if rot.ndim == 1:
                    rot = rot.reshape(n, n)
                maps.append(Similarity(entry["ratio"], rot, entry["translation"]))
            osc = bool(data.get("osc", False))
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"cannot parse IFS JSON: {exc}") from exc
        ifs = cls(tuple(maps), osc)
        if ifs.n != n:
            raise UsageError(f"IFS declares n={n} but its maps act on R^{ifs.n}")
        return ifs


@dataclass(frozen=True, eq=False)
class PointCloud:
    points: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        pts = np.ascontiguousarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise UsageError(f"a point cloud needs a nonempty (N, n) array, got shape {pts.shape}")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "metadata", dict(self.metadata))

    def __len__(self):
        return self.points.shape[0]

    @property
    def n(self):
        return self.points.shape[1]

    def to_csv(self, path):
        """One point per row, 17 significant digits, no header."""
        with open(path, "w", newline="\n") as fh:
            for row in self.points:
                fh.write(",".join(format(float(v), ".17g") for v in row))
                fh.write("\n")

    @classmethod
    def from_csv(cls, path):
        rows = []
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if line:
                    rows.append([float(v) for v in line.split(",")])
        if not rows:
            raise UsageError(f"{path}: empty point file")
        return cls(np.array(rows), {"source": f"csv:{path}"})


def similarity_dimension(ifs, tol=1e-12):
    """Root ``s`` of ``sum(r_i ** s) = 1`` by bisection."""
    r = ifs.ratios
    lo, hi = 0.0, 1.0
    while np.sum(r**hi) > 1.0:
        hi *= 2.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if np.sum(r**mid) > 1.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def generate_depth(ifs, k):
    """All ``len(maps) ** k`` length-k compositions applied to the first map's fixed point."""
    k = int(k)
    if k < 1:
        raise UsageError("depth must be >= 1")
    total = len(ifs.maps) ** k
    if total > MAX_COMPOSITIONS:
        raise UsageError(
            f"depth {k} needs {total} compositions (cap {MAX_COMPOSITIONS}); use chaos_game instead"
        )
    base = ifs.maps[0].fixed_point()
    pts = base[None, :]
    for _ in range(k):
        # outermost map varies slowest: f_i applied to every shorter composition
        pts = np.concatenate([f(pts) for f in ifs.maps])
    return PointCloud(
        pts,
        {
            "source": "generate_depth",
            "depth": k,
            "base_point": base.tolist(),
            "base_point_convention": "fixed point of the first map",
        },
    )


def chaos_game(ifs, num_points, rng):
    """Random orbit with uniform map choice, ``num_points`` points after a 100-step burn-in."""
    num_points = int(num_points)
    if num_points < 1:
        raise UsageError("num_points must be >= 1")
    choices = rng.integers(0, len(ifs.maps), size=BURN_IN + num_points)
    ratios = ifs.ratios
    rotations = np.stack([f.rotation for f in ifs.maps])
    translations = np.stack([f.translation for f in ifs.maps])
    x0 = ifs.maps[0].fixed_point()
    orbit = kernels.orbit(choices, ratios, rotations, translations, x0)
    return PointCloud(orbit[BURN_IN:], {"source": "chaos_game", "num_points": num_points, "burn_in": BURN_IN})


def embed_in_ball(cloud, radius=0.5):
    """Centre the bounding box at 0 and scale its half-diagonal to ``radius``."""
    radius = float(radius)
    if not 0.0 < radius <= 0.9:
        raise UsageError(f"embedding radius must lie in (0, 0.9], got {radius}")
    pts = cloud.points
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    half_diag = 0.5 * float(np.linalg.norm(hi - lo))
    if half_diag == 0.0:
        raise UsageError("cannot embed a degenerate cloud (all points coincide)")
    center = 0.5 * (lo + hi)
    scale = radius / half_diag
    meta = dict(cloud.metadata)
    meta["embedding"] = {"center": center.tolist(), "scale": scale, "radius": radius}
    return PointCloud((pts - center) * scale, meta)


# -- built-ins ---------------------------------------------------------------------


def _corner_maps(corners, lam):
    n = corners.shape[1]
    return tuple(Similarity(lam, np.eye(n), (1.0 - lam) * c) for c in corners)


def cantor_dust(n, lam):
    """``2 ** n`` maps of ratio ``lam`` fixing the corners of the unit cube."""
    if not 0.0 < lam < 0.5:
        raise UsageError("cantor_dust needs 0 < lam < 1/2")
    corners = np.array(list(itertools.product((0.0, 1.0), repeat=int(n))))
    return Ifs(_corner_maps(corners, lam), osc=True)


def four_corner(lam=0.25, n=2):
    """Four corner maps of the unit square, placed in the e1 e2 plane of R^n."""
    if not 0.0 < lam < 0.5:
        raise UsageError("four_corner needs 0 < lam < 1/2")
    if n < 2:
        raise UsageError("four_corner needs n >= 2")
    corners = np.zeros((4, n))
    corners[:, :2] = [(0, 0), (1, 0), (0, 1), (1, 1)]
    return Ifs(_corner_maps(corners, lam), osc=True)


def segment(n, num_points=10_000):
    """Evenly spaced points on the diameter ``[-1/2, 1/2] e_1``; rectifiable control set."""
    if n < 2:
        raise UsageError("segment needs n >= 2")
    pts = np.zeros((int(num_points), int(n)))
    pts[:, 0] = np.linspace(-0.5, 0.5, int(num_points))
    return PointCloud(pts, {"source": "segment", "num_points": int(num_points)})


def unit_cube_is_invariant(ifs, tol=1e-12):
    corners = np.array(list(itertools.product((0.0, 1.0), repeat=ifs.n)))
    return all(np.all((f(corners) >= -tol) & (f(corners) <= 1.0 + tol)) for f in ifs.maps)


def first_generation_separated(ifs, box=None):
    """True when the images of an invariant box are pairwise disjoint with a gap.

    ``box`` is ``(lo, hi)``; defaults to the unit cube, which the built-ins map
    into itself. Image boxes are the bounding boxes of the mapped corners, so
    the check is conservative for rotated maps.
    """
    n = ifs.n
    lo, hi = (np.zeros(n), np.ones(n)) if box is None else (np.asarray(box[0]), np.asarray(box[1]))
    corners = np.array([[hi[i] if bit else lo[i] for i, bit in enumerate(bits)]
                        for bits in itertools.product((0, 1), repeat=n)])
    images = []
    for f in ifs.maps:
        c = f(corners)
        if np.any(c.min(axis=0) < lo - 1e-12) or np.any(c.max(axis=0) > hi + 1e-12):
            return False
        images.append((c.min(axis=0), c.max(axis=0)))
    for (alo, ahi), (blo, bhi) in itertools.combinations(images, 2):
        # separated iff some axis has a strictly positive gap
        gap = np.maximum(alo - bhi, blo - ahi)
        if not np.any(gap > 0.0):
            return False
    return True


def parse_source(spec):
    """Resolve a CLI source spec into ``(kind, object)``.

    Accepted forms: a path to an IFS JSON file, ``cantor_dust:N:LAM`` (or
    ``cantor_dust:N:dim=S`` to pick the ratio giving dimension S),
    ``four_corner:LAM[:N]``, ``segment:N[:POINTS]``.
    """
    head, _, rest = spec.partition(":")
    args = rest.split(":") if rest else []
    try:
        if head == "cantor_dust":
            n = int(args[0])
            if args[1].startswith("dim="):
                return "ifs", cantor_dust(n, dust_ratio_for_dimension(n, float(args[1][4:])))
            return "ifs", cantor_dust(n, _ratio(args[1]))
        if head == "four_corner":
            lam = _ratio(args[0]) if args else 0.25
            return "ifs", four_corner(lam, int(args[1]) if len(args) > 1 else 2)
        if head == "segment":
            n = int(args[0]) if args else 2
            return "cloud", segment(n, int(args[1]) if len(args) > 1 else 10_000)
    except (IndexError, ValueError) as exc:
        raise UsageError(f"bad source spec {spec!r}: {exc}") from exc
    try:
        with open(spec) as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read IFS file {spec!r}: {exc}") from exc
    return "ifs", Ifs.from_json(text)


def _ratio(text):
    if "/" in text:
        num, den = text.split("/")
        return float(num) / float(den)
    return float(text)


def dust_ratio_for_dimension(n, s):
    """Ratio ``lam`` with ``2**n * lam**s = 1``."""
    return 2.0 ** (-n / s)

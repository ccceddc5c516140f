"""Property suites behind ``hyproj verify``.

Each suite draws its own samples from a seeded generator, measures the worst
residual of one property and compares it with a fixed tolerance.
"""
import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.integrate import simpson

from . import kernels
from .grassmann import orthogonal_complement_basis, sample_haar
from .hypgeo import PRINTED, STANDARD, Geodesic, Point, geodesic_point, mobius_geodesic, poincare_distance
from .projection import foot_angle, hyp_project, oracle_project, project_cloud

CASES = ((2, 1), (3, 1), (3, 2), (4, 2))
SAMPLE_RADIUS = 0.95


@dataclass
class SuiteResult:
    name: str
    passed: bool
    max_residual: float
    tolerance: float
    samples: int
    seconds: float = 0.0
    detail: dict = field(default_factory=dict)

    def line(self):
        flag = "PASS" if self.passed else "FAIL"
        return (
            f"{flag}  {self.name:<24} max residual {self.max_residual:.3e}"
            f"  (tol {self.tolerance:.0e}, {self.samples} samples, {self.seconds:.1f}s)"
        )

    def as_dict(self):
        d = asdict(self)
        d["max_residual"] = float(self.max_residual)
        return d


def random_ball_points(rng, count, n, radius=SAMPLE_RADIUS):
    """Uniform samples from the Euclidean ball of the given radius."""
    g = rng.standard_normal((count, n))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    r = radius * rng.uniform(size=count) ** (1.0 / n)
    return g * r[:, None]


def _result(name, residual, tol, samples, started, **detail):
    residual = float(residual)
    passed = bool(np.isfinite(residual) and residual < tol)
    return SuiteResult(name, passed, residual, tol, samples, time.perf_counter() - started, detail)


def _size(full, scale):
    return max(1, int(round(full * scale)))


# -- model suites ----------------------------------------------------------------


def metric_axioms(rng, scale=1.0, n=3, tol=1e-10):
    t0 = time.perf_counter()
    count = _size(100_000, scale)
    x, y, z = (random_ball_points(rng, count, n) for _ in range(3))
    dxy = kernels.poincare_dist_pairs(x, y)
    dyx = kernels.poincare_dist_pairs(y, x)
    dxz = kernels.poincare_dist_pairs(x, z)
    dyz = kernels.poincare_dist_pairs(y, z)
    dxx = kernels.poincare_dist_pairs(x, x)
    worst = max(
        np.max(np.abs(dxy - dyx)),
        np.max(np.abs(dxx)),
        np.max(np.maximum(dxz - dxy - dyz, 0.0)),
    )
    return _result("metric_axioms", worst, tol, count, t0)


def line_element(rng, scale=1.0, n=3, tol=1e-8, nodes=8001):
    """``d(0, x)`` against Simpson quadrature of ``2 / (1 - r^2)`` along the radius."""
    t0 = time.perf_counter()
    count = _size(1000, scale)
    x = random_ball_points(rng, count, n, radius=0.9)
    radii = np.linalg.norm(x, axis=1)
    s = np.linspace(0.0, 1.0, nodes)
    r = radii[:, None] * s[None, :]
    integral = simpson(2.0 / (1.0 - r * r), x=r, axis=1)
    d = kernels.poincare_dist_from(np.zeros(n), x)
    return _result("line_element", np.max(np.abs(d - integral)), tol, count, t0)


def collinearity(rng, scale=1.0, conv=STANDARD, n=3, tol=1e-9, per_geodesic=20):
    """Images of Mobius-sampled geodesic points must lie on one chord."""
    t0 = time.perf_counter()
    count = _size(1000, scale)
    worst = 0.0
    ts = np.linspace(0.0, 1.0, per_geodesic)
    for _ in range(count):
        a, b = random_ball_points(rng, 2, n)
        pts = mobius_geodesic(a, b, ts)
        img = conv.forward_rows(np.ascontiguousarray(pts))
        d = img[-1] - img[0]
        d /= np.linalg.norm(d)
        rel = img - img[0]
        off = rel - np.outer(rel @ d, d)
        worst = max(worst, float(np.max(np.linalg.norm(off, axis=1))))
    return _result("collinearity", worst, tol, count, t0, convention=conv.name)


def psi_roundtrip(rng, scale=1.0, conv=STANDARD, n=3, tol=1e-12):
    t0 = time.perf_counter()
    count = _size(100_000, scale)
    x = random_ball_points(rng, count, n)
    one = np.max(np.abs(conv.inverse_rows(conv.forward_rows(x)) - x))
    two = np.max(np.abs(conv.forward_rows(conv.inverse_rows(x)) - x))
    return _result("psi_roundtrip", max(one, two), tol, count, t0)


def geodesic_additivity(rng, scale=1.0, n=3, tol=1e-8):
    t0 = time.perf_counter()
    count = _size(200, scale)
    worst = 0.0
    for _ in range(count):
        a, b = random_ball_points(rng, 2, n)
        g = Geodesic(Point(a), Point(b))
        t = float(rng.uniform())
        p = geodesic_point(g, t)
        total = g.length
        worst = max(
            worst,
            abs(poincare_distance(g.a, p) + poincare_distance(p, g.b) - total),
            abs(poincare_distance(g.a, p) - t * total),
        )
    return _result("geodesic_additivity", worst, tol, count, t0)


# -- projection suites ---------------------------------------------------------------


def _case_samples(rng, count, n, m):
    planes = [sample_haar(n, m, rng) for _ in range(count)]
    xs = random_ball_points(rng, count, n)
    return planes, xs


def conjugation_vs_oracle(rng, scale=1.0, conv=STANDARD, tol=1e-6, oracle_tol=1e-10):
    t0 = time.perf_counter()
    count = _size(1000, scale)
    worst, per_case = 0.0, {}
    for n, m in CASES:
        planes, xs = _case_samples(rng, count, n, m)
        case_worst = 0.0
        for plane, x in zip(planes, xs):
            d = poincare_distance(hyp_project(plane, x, conv), oracle_project(plane, x, oracle_tol))
            case_worst = max(case_worst, d)
        per_case[f"{n},{m}"] = case_worst
        worst = max(worst, case_worst)
    return _result("conjugation_vs_oracle", worst, tol, count * len(CASES), t0, convention=conv.name, per_case=per_case)


def _disc_probes(rng, count, m, radius=0.999):
    g = rng.standard_normal((count, m))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return g * (radius * rng.uniform(size=count) ** (1.0 / m))[:, None]


def minimality(rng, scale=1.0, conv=STANDARD, tol=1e-8, probes=10_000):
    """No probe on the plane is closer to ``x`` than the computed foot.

    Half the probes are uniform on the disc, half within 1e-3 of the foot.
    """
    t0 = time.perf_counter()
    count = _size(1000, scale)
    worst = -math.inf
    for n, m in CASES:
        planes, xs = _case_samples(rng, count, n, m)
        for plane, x in zip(planes, xs):
            foot = hyp_project(plane, x, conv).coords
            u_foot = plane.basis.T @ foot
            far = _disc_probes(rng, probes // 2, m)
            near = u_foot + 1e-3 * _disc_probes(rng, probes - probes // 2, m, radius=1.0)
            q = np.ascontiguousarray(np.vstack([far, near]) @ plane.basis.T)
            q = q[np.linalg.norm(q, axis=1) < 1.0 - 1e-9]
            d_probe = kernels.poincare_dist_from(x, q)
            d_foot = poincare_distance(x, foot)
            worst = max(worst, float(np.max(d_foot - d_probe)))
    return _result("minimality", max(worst, 0.0), tol, count * len(CASES), t0, probes_per_sample=probes)


def orthogonality(rng, scale=1.0, conv=STANDARD, tol=1e-6):
    t0 = time.perf_counter()
    count = _size(1000, scale)
    worst = 0.0
    for n, m in CASES:
        planes, xs = _case_samples(rng, count, n, m)
        for plane, x in zip(planes, xs):
            worst = max(worst, abs(foot_angle(plane, x, conv) - 0.5 * math.pi))
    return _result("foot_angle", worst, tol, count * len(CASES), t0)


def lipschitz(rng, scale=1.0, conv=STANDARD, tol=1e-12, planes_per_case=100):
    """Pairwise distances never grow under projection."""
    t0 = time.perf_counter()
    pairs = _size(100_000, scale)
    per_plane = max(1, pairs // planes_per_case)
    worst, violations = 0.0, 0
    for n, m in CASES:
        for _ in range(planes_per_case):
            plane = sample_haar(n, m, rng)
            x = random_ball_points(rng, per_plane, n)
            y = random_ball_points(rng, per_plane, n)
            px = np.ascontiguousarray(project_cloud(plane, x, conv))
            py = np.ascontiguousarray(project_cloud(plane, y, conv))
            excess = kernels.poincare_dist_pairs(px, py) - kernels.poincare_dist_pairs(x, y)
            violations += int(np.sum(excess > tol))
            worst = max(worst, float(np.max(excess)))
    res = _result("lipschitz", max(worst, 0.0), tol, per_plane * planes_per_case * len(CASES), t0)
    res.passed = res.passed and violations == 0
    res.detail["violations"] = violations
    return res


def idempotence(rng, scale=1.0, conv=STANDARD, tol=1e-10):
    t0 = time.perf_counter()
    count = _size(10_000, scale)
    worst = 0.0
    for n, m in CASES:
        plane = sample_haar(n, m, rng)
        x = random_ball_points(rng, count, n)
        once = np.ascontiguousarray(project_cloud(plane, x, conv))
        twice = project_cloud(plane, once, conv)
        worst = max(worst, float(np.max(np.abs(twice - once))))
    return _result("idempotence", worst, tol, count * len(CASES), t0)


def _rotation_fixing(plane, rng):
    """Random orthogonal map preserving ``plane`` (and hence its complement)."""
    comp = orthogonal_complement_basis(plane)
    inner_sq = np.linalg.qr(rng.standard_normal((plane.m, plane.m)))[0]
    outer_sq = np.linalg.qr(rng.standard_normal((comp.shape[1], comp.shape[1])))[0]
    return plane.basis @ inner_sq @ plane.basis.T + comp @ outer_sq @ comp.T


def equivariance(rng, scale=1.0, conv=STANDARD, tol=1e-10):
    t0 = time.perf_counter()
    count = _size(10_000, scale)
    worst = 0.0
    for n, m in CASES:
        plane = sample_haar(n, m, rng)
        rot = _rotation_fixing(plane, rng)
        x = random_ball_points(rng, count, n)
        lhs = project_cloud(plane, np.ascontiguousarray(x @ rot.T), conv)
        rhs = project_cloud(plane, x, conv) @ rot.T
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return _result("equivariance", worst, tol, count * len(CASES), t0)


def run_all(seed=0, quick=False, use_printed_psi=False):
    """Run every suite; returns the list of :class:`SuiteResult`."""
    conv = PRINTED if use_printed_psi else STANDARD
    scale = 0.1 if quick else 1.0
    rng = np.random.default_rng(seed)
    return [
        metric_axioms(rng, scale),
        line_element(rng, scale),
        collinearity(rng, scale, conv),
        psi_roundtrip(rng, scale, conv),
        geodesic_additivity(rng, scale),
        conjugation_vs_oracle(rng, scale, conv),
        minimality(rng, scale, conv),
        orthogonality(rng, scale, conv),
        lipschitz(rng, scale, conv),
        idempotence(rng, scale, conv),
        equivariance(rng, scale, conv),
    ]

"""SVG scatter of a planar cloud, its projection onto a line and connecting geodesics."""
import numpy as np

from .errors import UsageError
from .hypgeo import Geodesic, Point, geodesic_point
from .projection import project_cloud

SIZE = 600
MARGIN = 20


def to_pixels(xy, size=SIZE, margin=MARGIN):
    """Model coordinates -> SVG pixel coordinates (y axis flipped)."""
    xy = np.asarray(xy, dtype=np.float64)
    half = size / 2.0
    scale = half - margin
    return np.stack([half + scale * xy[..., 0], half - scale * xy[..., 1]], axis=-1)


def _arc(x, foot, samples):
    g = Geodesic(Point(x), Point(foot))
    return np.array([geodesic_point(g, t).coords for t in np.linspace(0.0, 1.0, samples)])


def render_svg(points, plane, arcs=8, max_points=4000, arc_samples=24, size=SIZE):
    """Return SVG text for ``points`` (shape ``(N, 2)``) projected onto the line ``plane``."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise UsageError("nothing to render: the cloud is empty")
    if pts.shape[1] != 2 or plane.n != 2 or plane.m != 1:
        raise UsageError("rendering supports planar clouds projected onto a line (n=2, m=1)")
    if pts.shape[0] > max_points:
        pts = pts[np.linspace(0, pts.shape[0] - 1, max_points).astype(int)]
    feet = project_cloud(plane, np.ascontiguousarray(pts))
    half = size / 2.0
    radius = half - MARGIN
    direction = plane.basis[:, 0]
    ends = to_pixels(np.array([-direction, direction]), size)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<circle id="boundary" cx="{half:.3f}" cy="{half:.3f}" r="{radius:.3f}" fill="none" stroke="black"/>',
        f'<line id="plane" x1="{ends[0, 0]:.3f}" y1="{ends[0, 1]:.3f}" x2="{ends[1, 0]:.3f}" '
        f'y2="{ends[1, 1]:.3f}" stroke="#1f77b4" stroke-width="1.5"/>',
        '<g id="arcs" fill="none" stroke="#999999" stroke-width="0.8">',
    ]
    off_plane = np.linalg.norm(pts - feet, axis=1) > 1e-9
    chosen = np.flatnonzero(off_plane)[: max(0, int(arcs))]
    for i in chosen:
        poly = to_pixels(_arc(pts[i], feet[i], arc_samples), size)
        coords = " ".join(f"{x:.3f},{y:.3f}" for x, y in poly)
        out.append(f'<polyline points="{coords}"/>')
    out.append("</g>")
    for group, data, color in (("points", pts, "#d62728"), ("feet", feet, "#2ca02c")):
        out.append(f'<g id="{group}" fill="{color}">')
        for x, y in to_pixels(data, size):
            out.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="1.2"/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"

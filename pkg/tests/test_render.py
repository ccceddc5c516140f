import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from hyproj.errors import UsageError
from hyproj.fractals import embed_in_ball, four_corner, generate_depth
from hyproj.grassmann import MPlane, coordinate_plane
from hyproj.render import render_svg, to_pixels

NS = {"s": "http://www.w3.org/2000/svg"}


def line_at(deg):
    a = math.radians(deg)
    return MPlane(np.array([[math.cos(a)], [math.sin(a)]]))


def parse(svg):
    root = ET.fromstring(svg)
    return {el.get("id"): el for el in root if el.get("id")}


def test_structure():
    pts = embed_in_ball(generate_depth(four_corner(), 3)).points
    parts = parse(render_svg(pts, line_at(30), arcs=5))
    assert set(parts) == {"boundary", "plane", "arcs", "points", "feet"}
    assert len(parts["points"]) == len(parts["feet"]) == 64
    assert len(parts["arcs"]) == 5


def test_feet_on_plane_line():
    pts = embed_in_ball(generate_depth(four_corner(), 3)).points
    line = parse(render_svg(pts, line_at(57)))["plane"]
    p1 = np.array([float(line.get("x1")), float(line.get("y1"))])
    p2 = np.array([float(line.get("x2")), float(line.get("y2"))])
    d = (p2 - p1) / np.linalg.norm(p2 - p1)
    for c in parse(render_svg(pts, line_at(57)))["feet"]:
        q = np.array([float(c.get("cx")), float(c.get("cy"))]) - p1
        assert abs(q[0] * d[1] - q[1] * d[0]) < 1.0


def test_arcs_end_at_point_and_foot():
    pts = np.array([[0.2, 0.4]])
    plane = coordinate_plane(2, 1)
    (arc,) = parse(render_svg(pts, plane, arcs=1))["arcs"]
    coords = [tuple(map(float, xy.split(","))) for xy in arc.get("points").split()]
    np.testing.assert_allclose(coords[0], to_pixels(pts[0]), atol=1e-3)
    assert abs(coords[-1][1] - to_pixels([0.0, 0.0])[1]) < 1e-3


def test_empty_cloud():
    with pytest.raises(UsageError, match="empty"):
        render_svg(np.zeros((0, 2)), coordinate_plane(2, 1))


def test_rejects_higher_dimensions():
    with pytest.raises(UsageError):
        render_svg(np.zeros((3, 3)), coordinate_plane(3, 1))

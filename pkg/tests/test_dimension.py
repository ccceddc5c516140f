import math

import numpy as np
import pytest

from hyproj.dimension import (
    box_count,
    box_dimension,
    central_window,
    covering_measure,
    interior_occupancy,
)
from hyproj.errors import InsufficientScalesError, UsageError
from hyproj.fractals import cantor_dust, embed_in_ball, four_corner, generate_depth
from hyproj.grassmann import sample_haar
from hyproj.projection import project_coords


def brute_force_count(points, delta):
    cells = set()
    for p in np.atleast_2d(points):
        cells.add(tuple(math.floor(v / delta) for v in p))
    return len(cells)


class TestBoxCount:
    def test_single_point(self):
        assert box_count([[0.3, 0.7]], 0.1) == 1

    def test_separated_points(self):
        delta = 0.1
        assert box_count([[0.0, 0.0], [delta * math.sqrt(2) + 0.01, 0.0]], delta) == 2

    def test_middle_thirds_generation_two(self):
        pts = generate_depth(cantor_dust(1, 1 / 3), 2).points
        assert brute_force_count(pts, 1 / 9) == 4
        assert box_count(pts, 1 / 9) == 4

    def test_half_open_cells(self):
        assert box_count([[0.5], [0.4999999]], 0.5) == 2
        assert box_count([[-0.5], [-0.0000001]], 0.5) == 1

    def test_matches_brute_force(self, rng):
        pts = rng.uniform(-1, 1, (3000, 2))
        for delta in (0.3, 0.05, 0.01):
            assert box_count(pts, delta) == brute_force_count(pts, delta)

    def test_refinement_bounds(self, rng):
        pts = rng.standard_normal((5000, 2))
        for delta in (0.5, 0.1, 0.02):
            coarse, fine = box_count(pts, delta), box_count(pts, delta / 2)
            assert coarse <= fine <= 4 * coarse

    def test_rejects_nonpositive_delta(self):
        with pytest.raises(UsageError):
            box_count([[0.0]], 0.0)


class TestBoxDimension:
    def test_segment(self, rng):
        pts = rng.uniform(0, 1, (10_000, 1))
        est = box_dimension(pts, [2.0**-j for j in range(2, 8)])
        assert abs(est.slope - 1.0) < 0.05
        assert len(est.scales_used) == len(est.counts) >= 3

    def test_middle_thirds(self):
        pts = generate_depth(cantor_dust(1, 1 / 3), 8).points
        est = box_dimension(pts, [3.0**-j for j in range(2, 7)])
        assert abs(est.slope - math.log(2) / math.log(3)) < 0.05
        # exact arithmetic: the 2^8 left endpoints occupy 2^j cells at delta = 3^-j
        for j in range(2, 7):
            assert box_count(pts, 3.0**-j) == 2**j

    def test_repeated_point_has_no_usable_scales(self):
        with pytest.raises(InsufficientScalesError) as info:
            box_dimension(np.full((100, 2), 0.3), [0.1, 0.01, 0.001])
        assert len(info.value.diagnostics["rejected"]) == 3

    def test_permutation_invariant(self, rng):
        pts = embed_in_ball(generate_depth(cantor_dust(2, 0.3), 6)).points
        deltas = [2.0**-j for j in range(2, 9)]
        a = box_dimension(pts, deltas)
        b = box_dimension(pts[rng.permutation(len(pts))], deltas)
        assert a == b

    def test_offsets_average(self, rng):
        pts = rng.uniform(0, 1, (10_000, 1))
        est = box_dimension(pts, [2.0**-j for j in range(3, 8)], offsets=4)
        assert abs(est.slope - 1.0) < 0.05

    def test_klein_vs_poincare_coordinates(self, rng):
        from hyproj import kernels

        cloud = embed_in_ball(generate_depth(cantor_dust(3, 0.25), 6)).points
        deltas = [2.0**-j for j in range(3, 10)]
        for _ in range(5):
            plane = sample_haar(3, 2, rng)
            u = project_coords(plane, cloud)
            k = kernels.psi_rows(np.ascontiguousarray(u))
            assert abs(box_dimension(u, deltas).slope - box_dimension(k, deltas).slope) < 0.02


class TestCoveringMeasure:
    def test_definition(self, rng):
        pts = rng.uniform(0, 1, (2000, 2))
        for delta in (0.1, 0.03):
            assert covering_measure(pts, 2, delta) == box_count(pts, delta) * delta**2

    def test_unit_segment(self):
        pts = np.linspace(0.0, 1.0, 10_000)[:, None]
        for j in range(4, 8):
            assert abs(covering_measure(pts, 1, 2.0**-j) - 1.0) < 0.1

    def test_single_point(self):
        assert covering_measure([[0.2, 0.2]], 2, 0.01) == pytest.approx(1e-4)

    @pytest.mark.parametrize("k", [3, 4, 5])
    def test_four_corner_generation_scale(self, k):
        # the 4^k generation squares are separated, one point each
        pts = generate_depth(four_corner(0.25), k).points
        assert box_count(pts, 4.0**-k) == 4**k
        assert covering_measure(pts, 1, 4.0**-k) == pytest.approx(1.0, abs=1e-12)


class TestInteriorOccupancy:
    def test_dense_sample_fills_window(self, rng):
        pts = rng.uniform(-1, 1, (200_000, 2))
        assert interior_occupancy(pts, 2.0**-4, ([-0.5, -0.5], [0.5, 0.5])) == 1.0

    def test_finite_set_is_sparse(self, rng):
        pts = rng.uniform(-1, 1, (20, 1))
        assert interior_occupancy(pts, 1e-4, ([-0.5], [0.5])) < 0.01

    def test_central_window(self):
        lo, hi = central_window(np.array([[0.0, -2.0], [4.0, 2.0]]))
        np.testing.assert_allclose(lo, [1.0, -1.0])
        np.testing.assert_allclose(hi, [3.0, 1.0])

    def test_empty_window(self):
        with pytest.raises(UsageError):
            interior_occupancy([[0.0]], 0.1, ([0.2], [0.2]))

    def test_window_smaller_than_cell(self):
        with pytest.raises(UsageError):
            interior_occupancy([[0.0]], 1.0, ([0.2], [0.3]))

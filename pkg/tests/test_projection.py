import math

import numpy as np
import pytest

from hyproj import kernels
from hyproj.errors import NumericalError, UsageError
from hyproj.grassmann import coordinate_plane, embed, orthogonal_complement_basis, sample_haar
from hyproj.hypgeo import PRINTED, poincare_distance
from hyproj.projection import foot_angle, hyp_project, oracle_project, plane_angle, project_cloud, project_coords

from conftest import ball_points

CASES = [(2, 1), (3, 1), (3, 2), (4, 2)]


def test_fixes_points_on_plane(rng):
    plane = sample_haar(4, 2, rng)
    x = embed(plane, [0.3, -0.5])
    np.testing.assert_allclose(hyp_project(plane, x).coords, x, atol=1e-15)


def test_symmetric_case_goes_to_origin():
    plane = coordinate_plane(2, 1)
    assert np.linalg.norm(hyp_project(plane, [0.0, 0.5]).coords) < 1e-15


def test_result_lies_on_plane(rng):
    for n, m in CASES:
        plane = sample_haar(n, m, rng)
        for x in ball_points(rng, 50, n):
            q = hyp_project(plane, x).coords
            assert np.linalg.norm(q - plane.basis @ (plane.basis.T @ q)) < 1e-12


@pytest.mark.parametrize("n, m", CASES)
def test_conjugation_matches_oracle(rng, n, m):
    for _ in range(100):
        plane = sample_haar(n, m, rng)
        x = ball_points(rng, 1, n)[0]
        assert poincare_distance(hyp_project(plane, x), oracle_project(plane, x, 1e-10)) < 1e-6


def test_oracle_trivial_cases():
    plane = coordinate_plane(3, 2)
    x = np.array([0.2, -0.4, 0.0])
    assert np.linalg.norm(oracle_project(plane, x).coords - x) < 1e-8
    line = coordinate_plane(2, 1)
    assert np.linalg.norm(oracle_project(line, [0.0, 0.5]).coords) < 1e-8


def test_oracle_iteration_cap():
    with pytest.raises(NumericalError) as info:
        oracle_project(coordinate_plane(3, 2), [0.1, 0.2, 0.3], max_evals=20)
    assert "evals" in info.value.diagnostics


def test_oracle_rejects_bad_tol():
    with pytest.raises(UsageError):
        oracle_project(coordinate_plane(2, 1), [0.1, 0.1], tol=0.0)


def test_minimality_against_probes(rng):
    for n, m in CASES:
        for _ in range(20):
            plane = sample_haar(n, m, rng)
            x = ball_points(rng, 1, n)[0]
            foot = hyp_project(plane, x).coords
            q = np.ascontiguousarray(embed(plane, ball_points(rng, 10_000, m, radius=0.999) if m > 1
                                     else rng.uniform(-0.999, 0.999, (10_000, 1))))
            assert poincare_distance(x, foot) <= np.min(kernels.poincare_dist_from(x, q)) + 1e-8


class TestFootAngle:
    def test_symmetric_case_is_right_angle(self):
        assert foot_angle(coordinate_plane(2, 1), [0.0, 0.5]) == pytest.approx(math.pi / 2, abs=1e-15)

    @pytest.mark.parametrize("n, m", CASES)
    def test_random_right_angles(self, rng, n, m):
        for _ in range(250):
            plane = sample_haar(n, m, rng)
            x = ball_points(rng, 1, n)[0]
            assert abs(foot_angle(plane, x) - math.pi / 2) < 1e-6

    def test_perturbed_foot_is_not_orthogonal(self, rng):
        for _ in range(200):
            plane = sample_haar(3, 2, rng)
            x = ball_points(rng, 1, 3, radius=0.8)[0]
            if np.linalg.norm(x - plane.basis @ (plane.basis.T @ x)) < 0.05:
                continue
            q = hyp_project(plane, x).coords
            step = plane.basis @ rng.standard_normal(2)
            step *= 1e-2 / np.linalg.norm(step)
            assert abs(plane_angle(plane, q + step, x) - math.pi / 2) > 1e-3

    def test_on_plane_rejected(self):
        with pytest.raises(UsageError):
            foot_angle(coordinate_plane(3, 2), [0.2, 0.1, 0.0])

    def test_printed_convention_breaks_orthogonality(self, rng):
        plane = sample_haar(3, 1, rng)
        x = ball_points(rng, 1, 3, radius=0.8)[0]
        assert abs(foot_angle(plane, x, PRINTED) - math.pi / 2) > 1e-3


@pytest.mark.parametrize("n, m", CASES)
def test_one_lipschitz(rng, n, m):
    plane = sample_haar(n, m, rng)
    x, y = ball_points(rng, 20_000, n), ball_points(rng, 20_000, n)
    px = np.ascontiguousarray(project_cloud(plane, x))
    py = np.ascontiguousarray(project_cloud(plane, y))
    assert np.all(kernels.poincare_dist_pairs(px, py) <= kernels.poincare_dist_pairs(x, y) + 1e-12)


def test_idempotent(rng):
    plane = sample_haar(4, 2, rng)
    once = np.ascontiguousarray(project_cloud(plane, ball_points(rng, 1000, 4)))
    assert np.max(np.abs(project_cloud(plane, once) - once)) < 1e-10


def test_equivariant_under_rotations_fixing_plane(rng):
    plane = sample_haar(4, 2, rng)
    comp = orthogonal_complement_basis(plane)
    a = np.linalg.qr(rng.standard_normal((2, 2)))[0]
    b = np.linalg.qr(rng.standard_normal((2, 2)))[0]
    rot = plane.basis @ a @ plane.basis.T + comp @ b @ comp.T
    x = ball_points(rng, 1000, 4)
    lhs = project_cloud(plane, np.ascontiguousarray(x @ rot.T))
    assert np.max(np.abs(lhs - project_cloud(plane, x) @ rot.T)) < 1e-10


def test_project_coords_matches_ambient(rng):
    plane = sample_haar(5, 3, rng)
    x = ball_points(rng, 500, 5)
    np.testing.assert_allclose(project_coords(plane, x) @ plane.basis.T, project_cloud(plane, x), atol=1e-15)


def test_project_coords_shape_check():
    with pytest.raises(UsageError):
        project_coords(coordinate_plane(3, 1), np.zeros((4, 2)))

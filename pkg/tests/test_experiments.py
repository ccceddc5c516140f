import math
import warnings

import numpy as np
import pytest

from hyproj.dimension import box_count
from hyproj.errors import NumericalError, UsageError
from hyproj.experiments import (
    DEFAULT_MARSTRAND_DELTAS,
    Row,
    csv_columns,
    format_csv,
    parse_deltas,
    read_csv,
    resolve_cloud,
    run_besfed,
    run_interior,
    run_marstrand,
    write_csv,
)
from hyproj.grassmann import coordinate_plane, plane_seed, principal_angles, sample_haar
from hyproj.projection import project_coords


class TestParseDeltas:
    def test_range(self):
        assert parse_deltas("2^-2..2^-4") == [0.25, 0.125, 0.0625]

    def test_reversed_range(self):
        assert parse_deltas("2^-4..2^-2") == [0.0625, 0.125, 0.25]

    def test_list(self):
        assert parse_deltas("0.5, 3^-1,0.01") == [0.5, 1 / 3, 0.01]

    @pytest.mark.parametrize("text", ["2^-2..3^-4", "abc", "2^x"])
    def test_bad(self, text):
        with pytest.raises(UsageError):
            parse_deltas(text)


class TestCsv:
    def test_header(self):
        assert csv_columns(2) == ["plane_id", "seed", "n", "m", "dim_est", "r2", "cover_delta", "cover_est",
                                  "occ_est", "pa_1", "pa_2"]

    def test_sort_and_nan(self):
        rows = [Row(1, 5, 3, 1, cover_delta=0.5), Row(0, 4, 3, 1, cover_delta=0.25), Row(0, 4, 3, 1, cover_delta=0.5)]
        lines = format_csv(rows, 1).splitlines()
        assert [ln.split(",")[:1] + ln.split(",")[6:7] for ln in lines[1:]] == [["0", "0.5"], ["0", "0.25"],
                                                                                ["1", "0.5"]]
        assert lines[1] == "0,4,3,1,,,0.5,,"

    def test_roundtrip(self, tmp_path):
        row = Row(3, 17, 3, 2, dim_est=1 / 3, r2=0.99, cover_delta=0.125, cover_est=2.5, occ_est=math.nan,
                  angles=(0.1, 0.2))
        path = tmp_path / "rows.csv"
        write_csv([row], 2, path)
        (rec,) = read_csv(path)
        assert rec["dim_est"] == 1 / 3 and rec["pa_2"] == 0.2 and math.isnan(rec["occ_est"])
        assert rec["plane_id"] == 3 and rec["seed"] == 17


class TestMarstrand:
    def test_small_run(self):
        rows, summary = run_marstrand("cantor_dust:3:1/4", 2, 4, 4, seed=3, deltas=parse_deltas("2^-2..2^-6"))
        assert len(rows) == 4
        assert summary["ground_truth"] == pytest.approx(1.5, abs=1e-10)
        assert summary["source_dimension"] == pytest.approx(math.log(8) / math.log(4), abs=1e-10)
        for r in rows:
            assert r.seed == plane_seed(3, r.plane_id)
            plane = sample_haar(3, 2, np.random.default_rng(r.seed))
            np.testing.assert_array_equal(r.angles, principal_angles(plane, coordinate_plane(3, 2)))
            assert 0.0 <= r.r2 <= 1.0

    def test_ground_truth_caps_at_m(self):
        _, summary = run_marstrand("cantor_dust:3:dim=2.4", 1, 4, 2, seed=0, deltas=parse_deltas("2^-2..2^-6"))
        assert summary["ground_truth"] == 1

    @pytest.mark.parametrize("n", [2, 3])
    def test_segment_counts_match_analytic_oracle(self, n):
        # the segment is a diameter, so its image on a line is the interval between
        # the projected endpoints and is covered by floor(b/d) - floor(a/d) + 1 cells
        cloud, _ = resolve_cloud(f"segment:{n}", 0)
        ends = np.array([cloud.points[0], cloud.points[-1]])
        for i in range(10):
            plane = sample_haar(n, 1, np.random.default_rng(plane_seed(1, i)))
            a, b = sorted(project_coords(plane, ends)[:, 0])
            u = project_coords(plane, cloud.points)
            for delta in DEFAULT_MARSTRAND_DELTAS:
                assert box_count(u, delta) == math.floor(b / delta) - math.floor(a / delta) + 1

    @pytest.mark.parametrize("n, m", [(2, 1), (3, 1), (3, 2)])
    def test_segment_control(self, n, m):
        rows, summary = run_marstrand(f"segment:{n}", m, 0, 30, seed=1)
        assert summary["ground_truth"] == 1.0
        # non-degenerate: the plane foreshortens the segment by less than 80 degrees
        usable = []
        for r in rows:
            plane = sample_haar(n, m, np.random.default_rng(r.seed))
            if np.linalg.norm(plane.basis[0]) >= math.cos(math.radians(80)):
                usable.append(r)
        assert len(usable) >= 10
        worst = max(abs(r.dim_est - 1.0) for r in usable)
        assert worst <= 0.05

    def test_thread_count_does_not_change_rows(self):
        kw = dict(spec="cantor_dust:2:1/3", m=1, depth=6, num_planes=6, seed=9)
        a, _ = run_marstrand(**kw, threads=1)
        b, _ = run_marstrand(**kw, threads=4)
        assert format_csv(a, 1) == format_csv(b, 1)

    def test_all_fits_fail(self):
        with pytest.raises(NumericalError):
            run_marstrand("cantor_dust:2:1/3", 1, 3, 3, seed=0, deltas=[1e-6, 1e-7, 1e-8])

    def test_dimension_checks(self):
        with pytest.raises(UsageError):
            run_marstrand("cantor_dust:2:1/3", 2, 3, 1, seed=0)
        with pytest.raises(UsageError):
            run_marstrand("cantor_dust:2:1/3", 1, 3, 1, seed=0, n=3)


class TestBesfed:
    def test_small_run(self):
        rows, ctrl, summary = run_besfed(generations=4, num_planes=3, seed=2)
        assert len(rows) == len(ctrl) == 6
        assert {r.cover_delta for r in rows} == {4.0**-3, 4.0**-4}
        assert summary["generations"] == [3, 4]
        p = summary["per_plane"][0]
        assert p["decay_ratio"] == rows[1].cover_est / rows[0].cover_est

    def test_generation_range(self):
        with pytest.raises(UsageError):
            run_besfed(generations=9, num_planes=1)


class TestInterior:
    def test_segment_warns(self):
        with pytest.warns(UserWarning, match="2m"):
            rows, summary = run_interior("segment:2", 1, 0, 2, seed=0)
        assert not summary["dimension_exceeds_2m"]
        assert len(rows) == 6

    def test_thick_dust(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            rows, summary = run_interior("cantor_dust:3:dim=2.4", 1, 5, 3, seed=0)
        assert summary["dimension_exceeds_2m"]
        assert all(0.0 <= r.occ_est <= 1.0 for r in rows)
        assert set(summary["by_delta"]) == {format(2.0**-j, ".17g") for j in (3, 4, 5)}

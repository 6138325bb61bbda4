import numpy as np
import pytest

from balayage_lab import sphere_points, spherical_mean, unit_directions


class TestSpherePoints:
    @pytest.mark.parametrize("d,n", [(2, 16), (2, 257), (3, 64), (3, 1001)])
    def test_points_lie_on_sphere(self, d, n):
        center = np.linspace(0.5, 0.5 + d - 1, d)
        pts = sphere_points(center, 2.5, n)
        assert pts.shape == (n, d)
        radii = np.linalg.norm(pts - center, axis=1)
        assert np.allclose(radii, 2.5, rtol=1e-12, atol=1e-12)

    def test_deterministic(self):
        a = sphere_points(np.zeros(3), 1.0, 100)
        b = sphere_points(np.zeros(3), 1.0, 100)
        assert np.array_equal(a, b)

    def test_distinct_points(self):
        pts = sphere_points(np.zeros(2), 1.0, 64)
        assert len({tuple(p) for p in pts}) == 64

    def test_1d_gives_two_endpoints(self):
        pts = sphere_points(np.array([3.0]), 2.0, 5)
        vals = sorted(float(p[0]) for p in pts)
        assert vals[0] == 1.0 and vals[-1] == 5.0

    def test_centroid_near_center(self):
        # near-uniform layouts have tiny first moment
        for d, n in [(2, 128), (3, 512)]:
            pts = sphere_points(np.zeros(d), 1.0, n)
            assert np.linalg.norm(pts.mean(axis=0)) < 5e-2


class TestUnitDirections:
    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_unit_norm(self, d):
        dirs = unit_directions(d, 32)
        assert np.allclose(np.linalg.norm(dirs, axis=1), 1.0, atol=1e-12)

    def test_1d_alternates_signs(self):
        dirs = unit_directions(1, 8)
        assert set(np.unique(dirs)) == {-1.0, 1.0}


class TestSphericalMean:
    # f receives the whole (n, d) block of sample points at once

    def test_constant_function(self):
        got = spherical_mean(
            lambda pts: np.full(len(pts), 7.25), np.zeros(2), 1.0, 64
        )
        assert got == pytest.approx(7.25, abs=1e-14)

    def test_linear_function_gives_center_value(self):
        # mean of an affine map over a sphere is its value at the center
        center = np.array([0.4, -0.2, 0.1])
        f = lambda pts: 2.0 * pts[:, 0] - pts[:, 1] + 3.0 * pts[:, 2] + 1.0
        got = spherical_mean(f, center, 0.7, 4096)
        expect = 2.0 * 0.4 - (-0.2) + 3.0 * 0.1 + 1.0
        assert got == pytest.approx(expect, abs=1e-4)

    def test_quadratic_in_2d(self):
        # mean of x^2 + y^2 on a circle of radius r about 0 is exactly r^2
        got = spherical_mean(
            lambda pts: pts[:, 0] ** 2 + pts[:, 1] ** 2, np.zeros(2), 0.5, 128
        )
        assert got == pytest.approx(0.25, rel=1e-12)

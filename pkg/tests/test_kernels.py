import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import gamma

from balayage_lab import (
    InfinityConflictError,
    ext_add,
    ext_sum,
    radial_kernel,
    riesz_constant,
    spatial_kernel,
)


class TestRadialKernel:
    def test_log_branch_at_one(self):
        assert radial_kernel(0.0, 1.0) == 0.0

    def test_positive_order(self):
        assert radial_kernel(1.0, 2.0) == -0.5

    def test_negative_order(self):
        assert radial_kernel(-1.0, 3.0) == 3.0

    def test_log_branch_matches_log(self):
        for t in [0.1, 0.5, 2.0, 17.0]:
            assert radial_kernel(0.0, t) == pytest.approx(math.log(t), rel=1e-15)

    def test_rejects_nonpositive_t(self):
        with pytest.raises(ValueError):
            radial_kernel(1.0, 0.0)
        with pytest.raises(ValueError):
            radial_kernel(0.0, -2.0)

    @given(
        s=st.one_of(
            st.just(0.0),
            st.floats(min_value=0.01, max_value=3),
            st.floats(min_value=-3, max_value=-0.01),
        ),
        t=st.floats(min_value=1e-3, max_value=1e3),
        bump=st.floats(min_value=1e-3, max_value=10.0),
    )
    @settings(max_examples=300, deadline=None)
    def test_strictly_increasing_in_t(self, s, t, bump):
        # orders near 0 flatten below float resolution, so stay clear of them
        assert radial_kernel(s, t + bump) > radial_kernel(s, t)


class TestSpatialKernel:
    def test_diagonal_is_neg_inf_in_2d(self):
        assert spatial_kernel(2, [0.3, -0.1], [0.3, -0.1]) == -math.inf

    def test_diagonal_is_zero_in_1d(self):
        assert spatial_kernel(1, [0.7], [0.7]) == 0.0

    def test_unit_separation_in_3d(self):
        assert spatial_kernel(3, [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]) == -1.0

    def test_matches_radial_kernel_off_diagonal(self):
        rng = np.random.default_rng(0)
        for d in (1, 2, 3):
            for _ in range(50):
                y = rng.uniform(-5, 5, d)
                x = rng.uniform(-5, 5, d)
                expect = radial_kernel(d - 2, float(np.linalg.norm(y - x)))
                assert spatial_kernel(d, y, x) == pytest.approx(expect, rel=1e-14)

    def test_symmetry_is_exact(self):
        rng = np.random.default_rng(1)
        for d in (1, 2, 3):
            for _ in range(100):
                y = rng.uniform(-3, 3, d)
                x = rng.uniform(-3, 3, d)
                assert spatial_kernel(d, y, x) == spatial_kernel(d, x, y)

    def test_near_diagonal_snaps_in_2d(self):
        # relative closeness below the diagonal tolerance counts as equal
        x = np.array([1e6, 1e6])
        y = x + 1e-10
        assert spatial_kernel(2, y, x) == -math.inf

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            spatial_kernel(2, [0.0, 0.0, 0.0], [0.0, 0.0])

    def test_bounded_above_on_bounded_sets(self):
        # sup over a box is finite even though the kernel is unbounded below
        rng = np.random.default_rng(2)
        for d in (2, 3):
            pts = rng.uniform(-1, 1, (200, d))
            vals = [
                spatial_kernel(d, p, q)
                for p in pts[:20]
                for q in pts[20:40]
            ]
            assert max(vals) < math.log(2 * math.sqrt(d)) + 1.0


class TestRieszConstant:
    def test_known_values(self):
        assert riesz_constant(1) == 0.5
        assert riesz_constant(2) == pytest.approx(1 / (2 * math.pi), rel=1e-15)
        assert riesz_constant(3) == pytest.approx(1 / (4 * math.pi), rel=1e-15)

    def test_gamma_formula(self):
        # c_d = Gamma(d/2) / (2 pi^{d/2} max(1, d-2))
        for d in (1, 2, 3):
            expect = gamma(d / 2) / (2 * math.pi ** (d / 2) * max(1, d - 2))
            assert riesz_constant(d) == pytest.approx(expect, rel=1e-14)

    def test_rejects_bad_dimension(self):
        with pytest.raises(ValueError):
            riesz_constant(0)
        with pytest.raises(ValueError):
            riesz_constant(-1)


class TestExtendedSums:
    def test_plain_sum(self):
        assert ext_sum([1.0, 2.0, 3.5]) == 6.5

    def test_neg_inf_absorbs(self):
        assert ext_sum([1.0, -math.inf, 5.0]) == -math.inf

    def test_pos_inf_absorbs(self):
        assert ext_sum([math.inf, 2.0]) == math.inf

    def test_conflict_raises(self):
        with pytest.raises(InfinityConflictError):
            ext_sum([math.inf, -math.inf])

    def test_nan_rejected(self):
        with pytest.raises(ValueError):
            ext_sum([1.0, math.nan])

    def test_empty_sum_is_zero(self):
        assert ext_sum([]) == 0.0

    def test_ext_add_matches_ext_sum(self):
        assert ext_add(1.0, -math.inf) == -math.inf
        assert ext_add(2.0, 3.0) == 5.0
        with pytest.raises(InfinityConflictError):
            ext_add(math.inf, 0.0, -math.inf)

    @given(
        st.lists(
            st.floats(min_value=-1e12, max_value=1e12, allow_nan=False),
            max_size=30,
        )
    )
    @settings(max_examples=200, deadline=None)
    def test_never_returns_nan(self, xs):
        assert not math.isnan(ext_sum(xs))

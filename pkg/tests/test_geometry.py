import numpy as np
import pytest
from scipy import ndimage

from balayage_lab import (
    Box,
    CellSet,
    DiscreteMeasure,
    components,
    dirac,
    full_box_grid,
    grid_covering,
    inward_fill,
    is_relatively_compact,
    load_mask,
    rasterize_support,
    save_mask,
)


def blob_mask(rng, shape, n_blobs=4, r_lo=3, r_hi=9):
    mask = np.zeros(shape, dtype=bool)
    idx = np.indices(shape)
    for _ in range(n_blobs):
        c = [rng.integers(r_hi + 2, s - r_hi - 2) for s in shape]
        r = rng.integers(r_lo, r_hi)
        dist2 = sum((idx[k] - c[k]) ** 2 for k in range(len(shape)))
        mask |= dist2 <= r * r
    return mask


class TestComponents:
    def test_two_separated_blocks(self):
        g = full_box_grid([0, 0], [1, 1], 16)
        mask = np.zeros((16, 16), dtype=bool)
        mask[1:4, 1:4] = True
        mask[9:12, 9:12] = True
        parts = components(g, CellSet.from_mask(g, mask))
        assert len(parts) == 2

    def test_single_cell(self):
        g = full_box_grid([0, 0], [1, 1], 8)
        mask = np.zeros((8, 8), dtype=bool)
        mask[3, 3] = True
        cs = CellSet.from_mask(g, mask)
        parts = components(g, cs)
        assert len(parts) == 1
        assert parts[0].sorted_cells() == cs.sorted_cells()

    def test_checkerboard_uses_face_adjacency(self):
        g = full_box_grid([0, 0], [1, 1], 8)
        mask = np.indices((8, 8)).sum(axis=0) % 2 == 0
        parts = components(g, CellSet.from_mask(g, mask))
        assert len(parts) == int(mask.sum())

    def test_matches_scipy_label_oracle(self):
        rng = np.random.default_rng(13)
        for d, shape in [(2, (24, 24)), (3, (10, 10, 10))]:
            g = full_box_grid([0] * d, [1] * d, shape[0])
            for _ in range(10):
                mask = rng.uniform(size=shape) < 0.4
                structure = ndimage.generate_binary_structure(d, 1)
                _, n_oracle = ndimage.label(mask, structure=structure)
                parts = components(g, CellSet.from_mask(g, mask))
                assert len(parts) == n_oracle

    def test_ordering_is_deterministic(self):
        g = full_box_grid([0, 0], [1, 1], 16)
        mask = np.zeros((16, 16), dtype=bool)
        mask[10:12, 1:3] = True
        mask[1:3, 10:12] = True
        a = components(g, CellSet.from_mask(g, mask))
        b = components(g, CellSet.from_mask(g, mask))
        assert [p.sorted_cells() for p in a] == [p.sorted_cells() for p in b]
        firsts = [p.sorted_cells()[0] for p in a]
        assert firsts == sorted(firsts)

    def test_empty_cellset(self):
        g = full_box_grid([0, 0], [1, 1], 8)
        assert components(g, CellSet.from_mask(g, np.zeros((8, 8), bool))) == []


class TestInwardFill:
    def test_annulus_gains_its_hole(self):
        g = full_box_grid([0, 0], [1, 1], 40)
        mask = np.zeros((40, 40), dtype=bool)
        mask[10:30, 10:30] = True
        mask[14:26, 14:26] = False
        ring = CellSet.from_mask(g, mask)
        filled = inward_fill(g, ring)
        expect = np.zeros((40, 40), dtype=bool)
        expect[10:30, 10:30] = True
        assert np.array_equal(filled.mask(), expect)

    def test_solid_square_is_fixed_point(self):
        g = full_box_grid([0, 0], [1, 1], 32)
        mask = np.zeros((32, 32), dtype=bool)
        mask[8:20, 8:20] = True
        s = CellSet.from_mask(g, mask)
        assert np.array_equal(inward_fill(g, s).mask(), mask)

    def test_contains_input(self):
        rng = np.random.default_rng(14)
        for _ in range(20):
            g = full_box_grid([0, 0], [1, 1], 64)
            s = CellSet.from_mask(g, blob_mask(rng, (64, 64)))
            assert s.issubset(inward_fill(g, s))

    def test_idempotence(self):
        rng = np.random.default_rng(15)
        for _ in range(20):
            g = full_box_grid([0, 0], [1, 1], 64)
            s = CellSet.from_mask(g, blob_mask(rng, (64, 64)))
            once = inward_fill(g, s)
            twice = inward_fill(g, once)
            assert np.array_equal(once.mask(), twice.mask())

    def test_monotone_in_s(self):
        rng = np.random.default_rng(16)
        for _ in range(20):
            g = full_box_grid([0, 0], [1, 1], 64)
            big = blob_mask(rng, (64, 64), n_blobs=5)
            small = big & (rng.uniform(size=big.shape) < 0.6)
            fill_small = inward_fill(g, CellSet.from_mask(g, small))
            fill_big = inward_fill(g, CellSet.from_mask(g, big))
            assert fill_small.issubset(fill_big)

    def test_monotone_in_domain(self):
        # same spacing, strictly larger box: compare filled cells spatially
        rng = np.random.default_rng(17)
        for _ in range(10):
            small_g = full_box_grid([0, 0], [1, 1], 64)
            big_g = full_box_grid([-0.5, -0.5], [1.5, 1.5], 128)
            mask = blob_mask(rng, (64, 64))
            s_small = CellSet.from_mask(small_g, mask)
            centers = small_g.cell_centers(s_small.sorted_cells())
            s_big = CellSet(
                big_g,
                frozenset(big_g.cell_of_point(p) for p in centers),
            )
            filled_small = inward_fill(small_g, s_small)
            filled_big = inward_fill(big_g, s_big)
            big_cells = set(filled_big.sorted_cells())
            for p in small_g.cell_centers(filled_small.sorted_cells()):
                assert big_g.cell_of_point(p) in big_cells

    def test_complement_components_all_reach_infinity(self):
        rng = np.random.default_rng(18)
        for _ in range(20):
            g = full_box_grid([0, 0], [1, 1], 64)
            filled = inward_fill(g, CellSet.from_mask(g, blob_mask(rng, (64, 64))))
            leftover = g.all_cells().difference(filled)
            band = g.frontier_band()
            for comp in components(g, leftover):
                assert (comp.mask() & band).any(), (
                    "complement component sealed off from infinity"
                )

    def test_rejects_non_compact_input(self):
        g = full_box_grid([0, 0], [1, 1], 16)
        mask = np.zeros((16, 16), dtype=bool)
        mask[0, 5] = True
        with pytest.raises(ValueError):
            inward_fill(g, CellSet.from_mask(g, mask))


class TestRelativeCompactness:
    def test_frame_touching_set_is_not_compact(self):
        g = full_box_grid([0, 0], [1, 1], 16)
        mask = np.zeros((16, 16), dtype=bool)
        mask[0, 0] = True
        assert not is_relatively_compact(g, CellSet.from_mask(g, mask))

    def test_centered_block_is_compact(self):
        g = full_box_grid([0, 0], [1, 1], 16)
        mask = np.zeros((16, 16), dtype=bool)
        mask[6:10, 6:10] = True
        assert is_relatively_compact(g, CellSet.from_mask(g, mask))

    def test_against_dilation_oracle(self):
        # S is relatively compact iff dilating S by one cell stays inside g
        rng = np.random.default_rng(19)
        structure = ndimage.generate_binary_structure(2, 1)
        for _ in range(100):
            g = full_box_grid([0, 0], [1, 1], 32)
            mask = rng.uniform(size=(32, 32)) < 0.08
            if not mask.any():
                continue
            grown = ndimage.binary_dilation(mask, structure=structure)
            frame_clear = grown.sum() == ndimage.binary_dilation(
                np.pad(mask, 1), structure=structure
            )[1:-1, 1:-1].sum()
            inside_ok = not (
                mask[0, :].any() or mask[-1, :].any()
                or mask[:, 0].any() or mask[:, -1].any()
            )
            oracle = frame_clear and inside_ok
            assert is_relatively_compact(g, CellSet.from_mask(g, mask)) == oracle


class TestRasterize:
    def test_single_atom_single_cell(self):
        g = full_box_grid([0, 0], [1, 1], 10)
        cs = rasterize_support(g, [dirac([0.55, 0.55])])
        assert len(cs.sorted_cells()) == 1
        assert cs.sorted_cells()[0] == g.cell_of_point([0.55, 0.55])

    def test_circle_of_atoms_fills_to_disc(self):
        g = full_box_grid([-1, -1], [1, 1], 64)
        ang = np.linspace(0, 2 * np.pi, 200, endpoint=False)
        pts = 0.6 * np.c_[np.cos(ang), np.sin(ang)]
        m = DiscreteMeasure.from_atoms(2, [(p, 1.0) for p in pts])
        filled = inward_fill(g, rasterize_support(g, [m]))
        mask = filled.mask()
        h = 2.0 / 64
        # cell centers well inside the circle must be filled, well outside not
        for cell in np.ndindex(*mask.shape):
            c = g.cell_center(cell)
            r = np.linalg.norm(c)
            if r < 0.6 - 2 * h:
                assert mask[cell]
            elif r > 0.6 + 2 * h:
                assert not mask[cell]

    def test_empty_list(self):
        g = full_box_grid([0, 0], [1, 1], 8)
        assert rasterize_support(g, []).sorted_cells() == []

    def test_atom_outside_grid_rejected(self):
        g = full_box_grid([0, 0], [1, 1], 8)
        with pytest.raises(ValueError):
            rasterize_support(g, [dirac([2.0, 0.5])])


class TestMaskIO:
    def test_roundtrip_2d(self, tmp_path):
        rng = np.random.default_rng(20)
        g = full_box_grid([-1.0, 0.25], [1.0, 2.25], 32)
        path = tmp_path / "grid.mask"
        save_mask(g, path)
        back = load_mask(path)
        assert back.d == g.d
        assert back.spacing == g.spacing
        assert np.array_equal(back.origin, g.origin)
        assert np.array_equal(back.inside, g.inside)

    def test_roundtrip_3d(self, tmp_path):
        g = full_box_grid([0, 0, 0], [1, 1, 1], 6)
        path = tmp_path / "grid3.mask"
        save_mask(g, path)
        back = load_mask(path)
        assert back.d == 3
        assert np.array_equal(back.inside, g.inside)

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            load_mask(tmp_path / "absent.mask")


class TestGridCovering:
    def test_atoms_in_distinct_nonadjacent_cells(self):
        rng = np.random.default_rng(21)
        pts = rng.uniform(-1, 1, (12, 2))
        g = grid_covering(pts)
        cells = [g.cell_of_point(p) for p in pts]
        assert len(set(cells)) == len(cells)
        min_gap = min(
            np.linalg.norm(a - b)
            for i, a in enumerate(pts)
            for b in pts[i + 1:]
        )
        assert min_gap >= 3 * g.spacing

    def test_all_points_are_interior(self):
        rng = np.random.default_rng(22)
        pts = rng.uniform(-5, 5, (8, 3))
        g = grid_covering(pts)
        band = g.frontier_band()
        for p in pts:
            assert g.box().contains(p)
            assert not band[g.cell_of_point(p)]

    def test_explicit_spacing_respected(self):
        pts = np.array([[0.0, 0.0], [1.0, 0.0]])
        g = grid_covering(pts, spacing=0.25)
        assert g.spacing == 0.25

    def test_axis_cap_bounds_auto_spacing(self):
        # a tight pair plus a far point would want a tiny spacing; the cap
        # floors it so the grid stays affordable
        pts = np.array([[0.0, 0.0], [1e-4, 0.0], [100.0, 0.0]])
        g = grid_covering(pts, max_cells_per_axis=64)
        assert max(g.shape) <= 64 + 8


class TestCellSetAndBox:
    def test_set_algebra(self):
        g = full_box_grid([0, 0], [1, 1], 8)
        a = np.zeros((8, 8), bool)
        b = np.zeros((8, 8), bool)
        a[1:4, 1:4] = True
        b[2:6, 2:6] = True
        A, B = CellSet.from_mask(g, a), CellSet.from_mask(g, b)
        assert np.array_equal(A.union(B).mask(), a | b)
        assert np.array_equal(A.difference(B).mask(), a & ~b)
        assert A.difference(B).issubset(A)

    def test_centers_match_sorted_cells(self):
        g = full_box_grid([0, 0], [1, 1], 8)
        mask = np.zeros((8, 8), bool)
        mask[2, 3] = mask[5, 1] = True
        cs = CellSet.from_mask(g, mask)
        got = cs.centers()
        expect = g.cell_centers(cs.sorted_cells())
        assert np.array_equal(got, expect)

    def test_box_geometry(self):
        box = Box(np.array([0.0, -1.0]), np.array([2.0, 3.0]))
        assert np.array_equal(box.center(), [1.0, 1.0])
        assert box.diameter() == pytest.approx(np.hypot(2, 4))
        assert box.contains([0.5, 0.0])
        assert not box.contains([2.5, 0.0])
        grown = box.expanded(1.0)
        assert grown.contains([2.5, 0.0])

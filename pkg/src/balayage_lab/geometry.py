"""Rasterized open sets, connected components, and inward filling.

A GridOpenSet is a uniform cell grid (d = 2 or 3) with a boolean inside mask;
the open set is the union of the inside cells.  Everything beyond the array
frame is complement.  Cell adjacency is by shared faces (4 neighbors in 2d,
6 in 3d).

Inward filling removes the holes of a cell set S: take the complement of S
within the grid, add a virtual node at infinity adjacent to every frontier
cell (inside cells touching the complement of the open set or the frame),
and drop the connected component of that node.  What remains, S plus any
complement components not reaching infinity, is the filled set.  Filling is
idempotent and monotone both in S and in the surrounding open set.

Mask file format (load_mask / save_mask): first line a JSON header
{"origin": [...], "spacing": h}, then one text row per cell row with '#'
for inside and '.' for outside.  3d masks are stacked 2d slices along the
first axis separated by single blank lines.  Row r, column c of a slice is
the cell (r, c) (slice index first in 3d); the cell (i, j[, k]) covers
origin + [i, i+1] * h along the first axis and so on.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .measures import DiscreteMeasure

__all__ = [
    "Box",
    "GridOpenSet",
    "CellSet",
    "components",
    "is_relatively_compact",
    "inward_fill",
    "rasterize_support",
    "grid_covering",
    "full_box_grid",
    "save_mask",
    "load_mask",
]


@dataclass(frozen=True)
class Box:
    """Axis-aligned closed box given by corner arrays lo <= hi."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lo, dtype=float)
        hi = np.asarray(self.hi, dtype=float)
        if lo.shape != hi.shape or lo.ndim != 1 or np.any(lo > hi):
            raise ValueError("box needs 1d corners with lo <= hi")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def contains(self, p, strict: bool = False) -> bool:
        p = np.asarray(p, dtype=float)
        if strict:
            return bool(np.all(p > self.lo) and np.all(p < self.hi))
        return bool(np.all(p >= self.lo) and np.all(p <= self.hi))

    def center(self) -> np.ndarray:
        return 0.5 * (self.lo + self.hi)

    def diameter(self) -> float:
        return float(np.linalg.norm(self.hi - self.lo))

    def expanded(self, pad: float) -> "Box":
        return Box(self.lo - pad, self.hi + pad)


def _face_structure(d: int) -> np.ndarray:
    return ndimage.generate_binary_structure(d, 1)


@dataclass(frozen=True)
class GridOpenSet:
    """Uniform grid (d in {2, 3}) whose inside cells form an open set."""

    origin: np.ndarray
    spacing: float
    inside: np.ndarray

    def __post_init__(self):
        origin = np.asarray(self.origin, dtype=float)
        inside = np.asarray(self.inside, dtype=bool)
        if inside.ndim not in (2, 3):
            raise ValueError("grids are 2d or 3d")
        if origin.shape != (inside.ndim,):
            raise ValueError("origin length must match grid dimension")
        if not float(self.spacing) > 0.0:
            raise ValueError("spacing must be positive")
        if not inside.any():
            raise ValueError("grid needs at least one inside cell")
        inside = inside.copy()
        inside.setflags(write=False)
        origin.setflags(write=False)
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "spacing", float(self.spacing))
        object.__setattr__(self, "inside", inside)

    @property
    def d(self) -> int:
        return self.inside.ndim

    @property
    def shape(self) -> tuple:
        return self.inside.shape

    def box(self) -> Box:
        hi = self.origin + self.spacing * np.asarray(self.shape, dtype=float)
        return Box(self.origin, hi)

    def cell_center(self, cell) -> np.ndarray:
        return self.origin + self.spacing * (np.asarray(cell, dtype=float) + 0.5)

    def cell_centers(self, cells) -> np.ndarray:
        idx = np.asarray(sorted(cells), dtype=float).reshape(-1, self.d)
        return self.origin + self.spacing * (idx + 0.5)

    def cell_of_point(self, p) -> tuple:
        """Index of the cell containing p; raises if p is outside the array box."""
        p = np.asarray(p, dtype=float)
        rel = (p - self.origin) / self.spacing
        idx = np.floor(rel).astype(int)
        if np.any(idx < 0) or np.any(idx >= np.asarray(self.shape)):
            raise ValueError(f"point {p.tolist()} is outside the grid box")
        return tuple(int(i) for i in idx)

    def frontier_band(self) -> np.ndarray:
        """Inside cells face-adjacent to a non-inside cell or to the frame."""
        padded = np.pad(self.inside, 1, mode="constant", constant_values=False)
        eroded = ndimage.binary_erosion(padded, structure=_face_structure(self.d))
        core = eroded[(slice(1, -1),) * self.d]
        return self.inside & ~core

    def all_cells(self) -> "CellSet":
        return CellSet.from_mask(self, self.inside)


@dataclass(frozen=True)
class CellSet:
    """A subset of the inside cells of a grid, stored as index tuples."""

    grid: GridOpenSet
    cells: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        cells = frozenset(tuple(int(i) for i in c) for c in self.cells)
        for c in cells:
            if len(c) != self.grid.d or not self.grid.inside[c]:
                raise ValueError(f"cell {c} is not an inside cell of the grid")
        object.__setattr__(self, "cells", cells)

    @classmethod
    def from_mask(cls, grid: GridOpenSet, mask: np.ndarray) -> "CellSet":
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != grid.shape:
            raise ValueError("mask shape must match the grid")
        return cls(grid, frozenset(zip(*(a.tolist() for a in np.nonzero(mask)))))

    def mask(self) -> np.ndarray:
        out = np.zeros(self.grid.shape, dtype=bool)
        if self.cells:
            idx = tuple(np.array(a) for a in zip(*sorted(self.cells)))
            out[idx] = True
        return out

    def centers(self) -> np.ndarray:
        return self.grid.cell_centers(self.cells)

    def sorted_cells(self) -> list:
        return sorted(self.cells)

    def __len__(self) -> int:
        return len(self.cells)

    def __contains__(self, cell) -> bool:
        return tuple(int(i) for i in cell) in self.cells

    def union(self, other: "CellSet") -> "CellSet":
        self._check_same_grid(other)
        return CellSet(self.grid, self.cells | other.cells)

    def difference(self, other: "CellSet") -> "CellSet":
        self._check_same_grid(other)
        return CellSet(self.grid, self.cells - other.cells)

    def issubset(self, other: "CellSet") -> bool:
        self._check_same_grid(other)
        return self.cells <= other.cells

    def _check_same_grid(self, other: "CellSet"):
        if other.grid is not self.grid and not (
            np.array_equal(other.grid.origin, self.grid.origin)
            and other.grid.spacing == self.grid.spacing
            and np.array_equal(other.grid.inside, self.grid.inside)
        ):
            raise ValueError("cell sets live on different grids")


def components(g: GridOpenSet, cells: CellSet) -> list:
    """Face-connected components of a cell set, ordered by smallest cell index."""
    if len(cells) == 0:
        return []
    mask = cells.mask()
    labels, _ = ndimage.label(mask, structure=_face_structure(g.d))
    grouped: dict[int, list] = {}
    coords = np.column_stack(np.nonzero(mask))
    for lab, coord in zip(labels[mask].tolist(), coords.tolist()):
        grouped.setdefault(lab, []).append(tuple(coord))
    comps = [CellSet(g, frozenset(v)) for v in grouped.values()]
    comps.sort(key=lambda cs: min(cs.cells))
    return comps


def is_relatively_compact(g: GridOpenSet, S: CellSet) -> bool:
    """True when no cell of S lies in the frontier band of the grid."""
    if len(S) == 0:
        return True
    return not bool(np.any(S.mask() & g.frontier_band()))


def inward_fill(g: GridOpenSet, S: CellSet) -> CellSet:
    """S together with every hole it encloses inside g.

    Removes from g the connected component (through complement cells of S,
    plus the virtual node at infinity attached to the frontier band) that
    reaches infinity.  Requires S relatively compact in g.
    """
    if not is_relatively_compact(g, S):
        raise ValueError("inward_fill requires S relatively compact in the grid")
    s_mask = S.mask()
    complement = g.inside & ~s_mask
    frontier = g.frontier_band()
    labels, n = ndimage.label(complement, structure=_face_structure(g.d))
    frontier_labels = np.unique(labels[frontier & complement])
    frontier_labels = frontier_labels[frontier_labels > 0]
    escape = np.isin(labels, frontier_labels)
    filled = g.inside & ~escape
    # every complement component left after filling was kept because it
    # misses the frontier band; assert the removed part is one piece with
    # the node at infinity, i.e. each escaping component touches the band
    for k in frontier_labels:
        assert bool(np.any((labels == k) & frontier))
    return CellSet.from_mask(g, filled)


def rasterize_support(g: GridOpenSet, measures) -> CellSet:
    """Cells of g containing at least one atom of the given measures.

    Every atom must land in an inside cell; an atom outside the open set is
    an error.
    """
    cells = set()
    for mu in measures:
        if mu.d != g.d:
            raise ValueError("measure dimension does not match the grid")
        for loc in mu.locations:
            cell = g.cell_of_point(loc)
            if not g.inside[cell]:
                raise ValueError(
                    f"atom at {loc.tolist()} falls on a non-inside cell {cell}"
                )
            cells.add(cell)
    return CellSet(g, frozenset(cells))


def full_box_grid(lo, hi, n_cells) -> GridOpenSet:
    """All-inside grid over the box [lo, hi] with n_cells along each axis.

    The spacing is set by the first axis; hi must be consistent with a
    uniform cubic cell, so pass a box whose edge ratios match n_cells.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    n_cells = np.asarray(n_cells, dtype=int)
    if n_cells.ndim == 0:
        n_cells = np.full(len(lo), int(n_cells))
    spacing = float((hi[0] - lo[0]) / n_cells[0])
    expect = lo + spacing * n_cells
    if not np.allclose(expect, hi, rtol=0.0, atol=1e-9 * max(1.0, spacing)):
        raise ValueError("box edges are not an integer number of cubic cells")
    return GridOpenSet(lo, spacing, np.ones(tuple(n_cells), dtype=bool))


def grid_covering(points, spacing: float | None = None, margin_cells: int = 3,
                  max_cells_per_axis: int = 512) -> GridOpenSet:
    """Full-box grid covering the given points with a margin of cells.

    If spacing is omitted it is chosen as a third of the minimum pairwise
    point distance, so distinct points land in distinct, non-adjacent cells,
    subject to the per-axis cell cap.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    d = pts.shape[1]
    if d not in (2, 3):
        raise ValueError("grids are 2d or 3d")
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    extent = float(np.max(hi - lo))
    if spacing is None:
        if len(pts) > 1:
            from scipy.spatial import cKDTree

            dist, _ = cKDTree(pts).query(pts, k=2)
            min_gap = float(np.min(dist[:, 1]))
        else:
            min_gap = 0.0
        if min_gap <= 0.0:
            spacing = max(extent, 1.0) / 16.0
        else:
            spacing = min_gap / 3.0
        floor = max(extent, 1e-30) / max_cells_per_axis
        spacing = max(spacing, floor)
    spacing = float(spacing)
    lo_g = lo - margin_cells * spacing
    counts = np.maximum(1, np.ceil((hi - lo_g) / spacing).astype(int)) + margin_cells
    return GridOpenSet(lo_g, spacing, np.ones(tuple(counts), dtype=bool))


def save_mask(g: GridOpenSet, path) -> None:
    """Write the grid to the plain-text mask format described above."""
    header = json.dumps(
        {"origin": [float(c) for c in g.origin], "spacing": g.spacing},
        sort_keys=True,
    )
    lines = [header]
    if g.d == 2:
        for row in g.inside:
            lines.append("".join("#" if v else "." for v in row))
    else:
        for k, slab in enumerate(g.inside):
            if k > 0:
                lines.append("")
            for row in slab:
                lines.append("".join("#" if v else "." for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_mask(path) -> GridOpenSet:
    """Read a grid from the plain-text mask format."""
    with open(path) as fh:
        raw = fh.read().splitlines()
    if not raw:
        raise ValueError("empty mask file")
    header = json.loads(raw[0])
    origin = header["origin"]
    spacing = float(header["spacing"])
    body = raw[1:]
    while body and not body[-1].strip():
        body = body[:-1]
    slabs, current = [], []
    for line in body:
        if not line.strip():
            slabs.append(current)
            current = []
        else:
            current.append([c == "#" for c in line])
    slabs.append(current)
    if any(len(s) == 0 for s in slabs):
        raise ValueError("blank slab in mask file")
    if len(slabs) == 1:
        inside = np.array(slabs[0], dtype=bool)
    else:
        inside = np.array(slabs, dtype=bool)
    if len(origin) != inside.ndim:
        raise ValueError("mask header origin length does not match mask body")
    return GridOpenSet(np.asarray(origin, dtype=float), spacing, inside)

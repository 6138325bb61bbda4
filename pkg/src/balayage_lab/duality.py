"""Duality between Jensen-type measures and their sweep potentials.

forward_map sends a measure omega that sweeps the point mass at x to the
potential V = pt_omega - K(., x).  After the balayage premise is verified,
V vanishes (at tolerance) outside the filled support hull and is cached with
that hull.  inverse_map goes back: it reads the measure off a sampled V by
a discrete Laplacian away from the pole, and estimates the mass left at the
pole itself from ring averages of V(y) / (-K(x, y)), whose limit at the pole
is one minus the pole mass.

mfs_fit approximates a harmonic function on a compact set by a least-squares
combination of kernel translates with sources outside the set (the method of
fundamental solutions).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .balayage import check_har_balayage
from .geometry import CellSet, GridOpenSet, inward_fill, rasterize_support
from .kernels import InfinityConflictError, radial_kernel, riesz_constant
from .measures import DiscreteMeasure, dirac
from .potentials import potential_values
from .sampling import sphere_points

__all__ = [
    "ASPotential",
    "MfsFit",
    "forward_map",
    "inverse_map",
    "mfs_fit",
    "ring_sources",
]


@dataclass(frozen=True)
class ASPotential:
    """Sweep potential V = pt_base - K(., pole) with its filled hull cached."""

    pole: np.ndarray
    base_measure: DiscreteMeasure
    grid: GridOpenSet
    infill: CellSet

    def __post_init__(self):
        pole = np.asarray(self.pole, dtype=float)
        if pole.shape != (self.base_measure.d,):
            raise ValueError("pole dimension does not match the base measure")
        pole.setflags(write=False)
        object.__setattr__(self, "pole", pole)

    @property
    def d(self) -> int:
        return self.base_measure.d

    def evaluate_many(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        pot = potential_values(self.base_measure, pts)
        ker = potential_values(dirac(self.pole), pts)
        with np.errstate(invalid="ignore"):
            out = pot - ker
        if np.any(np.isnan(out)):
            raise InfinityConflictError(
                "evaluation point sits on both the pole and supp of the base measure"
            )
        return out

    def evaluate(self, y) -> float:
        return float(self.evaluate_many(np.asarray(y, dtype=float).reshape(1, -1))[0])


def forward_map(
    omega: DiscreteMeasure, x, g: GridOpenSet, tol: float = 1e-3
) -> ASPotential:
    """Sweep potential of omega with pole x, after checking the balayage
    premise (potential agreement off the hull and mass 1 agreement) at tol."""
    x = np.asarray(x, dtype=float)
    report = check_har_balayage(dirac(x), omega, g, tol)
    if not report.verdict:
        raise ValueError(
            "omega does not sweep the point mass at x on this grid "
            f"(potential residual {report.potential_residual:.3e}, "
            f"mass gap {report.mass_gap:.3e})"
        )
    infill = inward_fill(g, rasterize_support(g, [dirac(x), omega]))
    return ASPotential(pole=x, base_measure=omega, grid=g, infill=infill)


def _lattice_axes(g: GridOpenSet, h: float):
    box = g.box()
    axes = []
    for k in range(g.d):
        n = int(math.ceil((box.hi[k] - box.lo[k]) / h))
        axes.append(box.lo[k] + h * (np.arange(n) + 0.5))
    return axes


def inverse_map(
    V,
    g: GridOpenSet,
    stencil_h: float,
    ring_radii=None,
    pole=None,
    mass_threshold: float = 1e-6,
    n_ring: int = 64,
) -> DiscreteMeasure:
    """Recover the base measure of a sweep potential.

    V is an ASPotential, or any callable mapping an (n, d) array to values
    together with an explicit pole.  The measure away from the pole is the
    scaled five/seven-point Laplacian of V on a lattice of spacing stencil_h
    over the grid box, one atom per lattice node, nodes within the largest
    ring radius of the pole excluded and weights below mass_threshold
    dropped.  The atom at the pole gets weight 1 - rho, where rho is the
    largest ring-averaged ratio V(y) / (-K(pole, y)) over the given
    ring_radii (default 4, 8, 16 stencil spacings).
    """
    if isinstance(V, ASPotential):
        evaluate = V.evaluate_many
        pole = V.pole if pole is None else np.asarray(pole, dtype=float)
        base = V.base_measure
    else:
        if pole is None:
            raise ValueError("a callable V needs an explicit pole")
        evaluate = lambda pts: np.asarray(V(pts), dtype=float)  # noqa: E731
        pole = np.asarray(pole, dtype=float)
        base = None
    d = g.d
    if pole.shape != (d,):
        raise ValueError(f"pole must have shape ({d},)")
    h = float(stencil_h)
    if h <= 0.0:
        raise ValueError("stencil_h must be positive")
    if ring_radii is None:
        ring_radii = (4.0 * h, 8.0 * h, 16.0 * h)
    ring_radii = [float(r) for r in ring_radii]
    if not ring_radii or min(ring_radii) <= 0.0:
        raise ValueError("ring radii must be positive")

    axes = _lattice_axes(g, h)
    nearest_gap = math.sqrt(
        sum(float(np.min(np.abs(ax - pole[k]))) ** 2 for k, ax in enumerate(axes))
    )
    if nearest_gap < 1e-9 * max(1.0, float(np.max(np.abs(pole)))):
        raise ValueError("the pole sits on a sample node; shift the lattice or pole")
    for rho in ring_radii:
        if -radial_kernel(d - 2, rho) <= 0.0:
            raise ValueError(
                f"ring radius {rho:g} is too large for a positive kernel denominator"
            )
        if base is not None and base.n_atoms:
            gaps = np.abs(np.linalg.norm(base.locations - pole, axis=1) - rho)
            if float(np.min(gaps)) < h:
                raise ValueError("a ring intersects the support of the base measure")

    mesh = np.meshgrid(*axes, indexing="ij")
    nodes = np.column_stack([m.ravel() for m in mesh])
    vals = evaluate(nodes).reshape([len(ax) for ax in axes])
    if np.any(np.isinf(vals)):
        raise ValueError("V is singular on a sample node; shift the lattice")

    lap = np.zeros_like(vals)
    core = (slice(1, -1),) * d
    lap_core = -2.0 * d * vals[core]
    for k in range(d):
        up = tuple(slice(2, None) if j == k else slice(1, -1) for j in range(d))
        dn = tuple(slice(0, -2) if j == k else slice(1, -1) for j in range(d))
        lap_core = lap_core + vals[up] + vals[dn]
    lap[core] = lap_core / (h * h)

    weights = riesz_constant(d) * lap * h ** d
    node_gap = np.linalg.norm(nodes - pole, axis=1).reshape(vals.shape)
    weights[node_gap <= max(ring_radii)] = 0.0
    keep = np.abs(weights) >= mass_threshold
    atoms = list(zip(nodes.reshape(*vals.shape, d)[keep], weights[keep]))

    ratios = []
    for rho in ring_radii:
        ring_pts = sphere_points(pole, rho, n_ring)
        ring_vals = evaluate(ring_pts)
        if np.any(np.isinf(ring_vals)):
            raise ValueError("a ring sample hit a singularity of V")
        ratios.append(float(np.mean(ring_vals)) / (-radial_kernel(d - 2, rho)))
    pole_weight = 1.0 - max(ratios)
    if abs(pole_weight) >= mass_threshold:
        atoms.append((pole, pole_weight))
    return DiscreteMeasure.from_atoms(d, atoms)


@dataclass(frozen=True)
class MfsFit:
    """Least-squares kernel-translate fit of a harmonic target."""

    sources: np.ndarray
    coefficients: np.ndarray
    sup_error: float
    success: bool
    regularized: bool = False

    def to_json_dict(self) -> dict:
        return {
            "sources": [[float(c) for c in s] for s in self.sources],
            "coefficients": [float(a) for a in self.coefficients],
            "sup_error": self.sup_error,
            "success": self.success,
            "regularized": self.regularized,
        }


def ring_sources(sample_points, m: int, factor: float = 1.5) -> np.ndarray:
    """m source points on a sphere around the samples at factor times their
    circumradius (measured from the centroid)."""
    pts = np.atleast_2d(np.asarray(sample_points, dtype=float))
    center = pts.mean(axis=0)
    circum = float(np.max(np.linalg.norm(pts - center, axis=1)))
    if circum <= 0.0:
        circum = 1.0
    return sphere_points(center, factor * circum, m)


def mfs_fit(sample_points, sample_values, sources, b: float) -> MfsFit:
    """Fit sample values by kernel translates from the given sources.

    Solves the least-squares system over the coefficients and reports the
    sup norm of the residual on the samples; success means sup_error < b.
    A rank-deficient system falls back to a ridge solve (1e-10) and sets the
    regularized flag.
    """
    pts = np.atleast_2d(np.asarray(sample_points, dtype=float))
    vals = np.asarray(sample_values, dtype=float)
    src = np.atleast_2d(np.asarray(sources, dtype=float))
    if len(vals) != len(pts):
        raise ValueError("sample point and value counts differ")
    d = pts.shape[1]
    if src.shape[1] != d:
        raise ValueError("source dimension mismatch")
    dist = np.linalg.norm(pts[:, None, :] - src[None, :, :], axis=2)
    if np.any(dist <= 0.0):
        raise ValueError("sources must be distinct from sample points")
    A = radial_kernel(d - 2, dist)
    coeff, _, rank, _ = np.linalg.lstsq(A, vals, rcond=None)
    regularized = False
    if rank < src.shape[0]:
        warnings.warn("rank-deficient kernel system; using ridge regularization")
        AtA = A.T @ A + 1e-10 * np.eye(src.shape[0])
        coeff = np.linalg.solve(AtA, A.T @ vals)
        regularized = True
    sup_error = float(np.max(np.abs(A @ coeff - vals)))
    return MfsFit(
        sources=src,
        coefficients=coeff,
        sup_error=sup_error,
        success=bool(sup_error < b),
        regularized=regularized,
    )

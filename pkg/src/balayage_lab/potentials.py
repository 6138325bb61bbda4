"""Potentials of atomic measures in extended-real arithmetic.

The potential of a measure at y is the weighted sum of spatial kernels
K(location, y).  For d >= 2 a point sitting exactly on an atom picks up an
infinite contribution: -inf under a positive atom, +inf under a negative one.
Distinct atoms never share a location (measures merge exactly), so at most
one infinite term can arise per evaluation point and the sum is always a
determined extended real; a conflict would be a corrupted measure and raises.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kernels import DIAGONAL_RTOL, InfinityConflictError, radial_kernel
from .measures import DiscreteMeasure
from .sampling import sphere_points, unit_directions

__all__ = [
    "PotentialValue",
    "potential",
    "potential_values",
    "potential_1d_closed",
    "asymptotic_deviation",
    "spherical_mean",
]

_CHUNK = 1 << 22  # max pairwise-distance entries held at once


@dataclass(frozen=True)
class PotentialValue:
    """Extended-real potential value.

    evaluable is False only where neither signed part is finite; for merged
    atomic measures that never happens, so it is always True here.
    """

    value: float
    evaluable: bool = True


def potential_values(mu: DiscreteMeasure, points) -> np.ndarray:
    """Potential of mu at each row of points, as extended reals.

    Finite contributions are summed per point; a point lying on an atom
    (within the relative diagonal threshold, d >= 2) yields -inf times the
    sign of that atom's weight.  Shape (m,) for input shape (m, d).
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] != mu.d:
        raise ValueError(f"points must have shape (m, {mu.d})")
    m = len(pts)
    if mu.is_zero:
        return np.zeros(m)
    locs = mu.locations
    w = mu.weights
    s = mu.d - 2
    atom_scale = float(np.max(np.abs(locs))) if mu.n_atoms else 0.0
    out = np.zeros(m)
    inf_sign = np.zeros(m)
    rows = max(1, _CHUNK // max(1, mu.n_atoms))
    for lo in range(0, m, rows):
        hi = min(m, lo + rows)
        block = pts[lo:hi]
        dist = np.linalg.norm(block[:, None, :] - locs[None, :, :], axis=2)
        scale = np.maximum(
            1.0, np.maximum(np.max(np.abs(block), axis=1), atom_scale)
        )
        on_diag = dist < DIAGONAL_RTOL * scale[:, None]
        if mu.d == 1:
            # the 1d kernel is |y - x|, continuous through the diagonal
            out[lo:hi] = dist @ w
            continue
        if np.any(on_diag):
            safe = np.where(on_diag, 1.0, dist)
            vals = radial_kernel(s, safe)
            vals = np.where(on_diag, 0.0, vals)
            out[lo:hi] = vals @ w
            # a positive atom drags the potential to -inf, a negative one to +inf
            pos_hit = np.any(on_diag & (w[None, :] > 0.0), axis=1)
            neg_hit = np.any(on_diag & (w[None, :] < 0.0), axis=1)
            if np.any(pos_hit & neg_hit):
                raise InfinityConflictError(
                    "point sits on atoms of both signs; +inf meets -inf"
                )
            inf_sign[lo:hi] = np.where(pos_hit, -1.0, np.where(neg_hit, 1.0, 0.0))
        else:
            out[lo:hi] = radial_kernel(s, dist) @ w
    out = np.where(inf_sign > 0, math.inf, out)
    out = np.where(inf_sign < 0, -math.inf, out)
    return out


def potential(mu: DiscreteMeasure, y) -> PotentialValue:
    """Potential of mu at the single point y."""
    val = potential_values(mu, np.asarray(y, dtype=float).reshape(1, -1))[0]
    return PotentialValue(value=float(val), evaluable=True)


def potential_1d_closed(mu: DiscreteMeasure, x: float) -> float:
    """Closed form for d == 1 potentials outside the support hull.

    For x to the right of every atom the potential is mass * x minus the
    first moment; to the left it is the negative of that.  Inside the open
    hull the closed form does not apply and a ValueError is raised.
    """
    if mu.d != 1:
        raise ValueError("potential_1d_closed requires a 1d measure")
    x = float(x)
    if mu.is_zero:
        return 0.0
    coords = mu.locations[:, 0]
    lo, hi = float(np.min(coords)), float(np.max(coords))
    total = mu.mass()
    moment = math.fsum(w * c for w, c in zip(mu.weights, coords))
    if x >= hi:
        return total * x - moment
    if x <= lo:
        return -total * x + moment
    raise ValueError(f"x={x} lies inside the support hull ({lo}, {hi})")


def asymptotic_deviation(mu: DiscreteMeasure, R: float, n_dirs: int = 32) -> float:
    """Far-field deviation max_dir |pt(R * dir) - mass * k(R)|.

    Requires R > 2 * sup |atom location|; the deviation decays like
    R**(1 - d) as R grows.
    """
    R = float(R)
    if R <= 0.0:
        raise ValueError("R must be positive")
    if R <= 2.0 * mu.support_radius():
        raise ValueError("R must exceed twice the support radius")
    dirs = unit_directions(mu.d, n_dirs)
    vals = potential_values(mu, R * dirs)
    ref = mu.mass() * radial_kernel(mu.d - 2, R)
    return float(np.max(np.abs(vals - ref)))


def spherical_mean(f, center, radius: float, n: int) -> float:
    """Equal-weight mean of f over the sphere around center.

    Uses the deterministic direction families from the sampling module;
    f must accept an (n, d) array and return n values.
    """
    if n < 1:
        raise ValueError("need n >= 1 sample points")
    center = np.asarray(center, dtype=float)
    pts = sphere_points(center, radius, n)
    vals = np.asarray(f(pts), dtype=float)
    return float(np.mean(vals))

"""Balls: boundary densities, harmonic measure quadrature, Green functions,
and a walk-on-spheres sampler.

Closed forms used here, for the ball B of center c and radius r:

* Boundary density with respect to the normalized surface measure,
  density(x, y) = r**(d-2) * (r**2 - |x-c|**2) / |x-y|**d, which is
  identically 1 when x = c and integrates to 1 in every dimension.
* Green function through the reflected distance
  t(x, y) = sqrt(|x-c|**2 |y-c|**2 - 2 r**2 (x-c).(y-c) + r**4) / r,
  g(y, x) = k(t) - k(|y - x|) with k the radial kernel profile of the
  dimension.  t is symmetric, equals |x - y| on the boundary sphere, and
  t**2 - |x-y|**2 = (r**2 - |x-c|**2)(r**2 - |y-c|**2) / r**2 >= 0 inside,
  so g >= 0, g is symmetric, and g vanishes on the boundary.  Outside the
  closed ball g is extended by zero; at the pole g(x, x) is set to +inf.

The walk-on-spheres sampler draws each sample from its own generator seeded
by (seed, sample index), so results do not depend on evaluation order and
any subset of samples can be reproduced in isolation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import GridOpenSet
from .kernels import radial_kernel
from .measures import DiscreteMeasure
from .sampling import sphere_points, unit_directions

__all__ = [
    "BallDomain",
    "WosConfig",
    "WalkRestartOverflow",
    "poisson_density",
    "harmonic_measure_quadrature",
    "green_ball",
    "walk_on_spheres",
]


@dataclass(frozen=True)
class BallDomain:
    """Open ball (interval, disc, ball for d = 1, 2, 3)."""

    d: int
    center: np.ndarray
    radius: float

    def __post_init__(self):
        center = np.asarray(self.center, dtype=float)
        if self.d not in (1, 2, 3):
            raise ValueError("BallDomain supports d in (1, 2, 3)")
        if center.shape != (self.d,):
            raise ValueError(f"center must have shape ({self.d},)")
        if not float(self.radius) > 0.0:
            raise ValueError("radius must be positive")
        center.setflags(write=False)
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "radius", float(self.radius))

    def contains(self, p) -> bool:
        return float(np.linalg.norm(np.asarray(p, dtype=float) - self.center)) < self.radius

    def boundary_distance(self, p) -> float:
        return self.radius - float(np.linalg.norm(np.asarray(p, dtype=float) - self.center))

    @property
    def inradius(self) -> float:
        return self.radius


@dataclass(frozen=True)
class WosConfig:
    n_samples: int
    seed: int
    epsilon_shell: float | None = None  # default: 1e-4 * inradius of the domain
    max_steps: int = 10_000


class WalkRestartOverflow(RuntimeError):
    """More than 1 percent of walks hit the step cap and were restarted."""


def _require_interior(B: BallDomain, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (B.d,):
        raise ValueError(f"point must have shape ({B.d},)")
    if not B.contains(x):
        raise ValueError("point must lie strictly inside the ball")
    return x


def poisson_density(B: BallDomain, x, y) -> float:
    """Density of harmonic measure from x against normalized surface measure.

    Requires x strictly inside and y on the boundary sphere.
    """
    x = _require_interior(B, x)
    y = np.asarray(y, dtype=float)
    r = B.radius
    on_sphere = abs(float(np.linalg.norm(y - B.center)) - r) <= 1e-9 * r
    if not on_sphere:
        raise ValueError("y must lie on the boundary sphere")
    dx2 = float(np.sum((x - B.center) ** 2))
    dist = float(np.linalg.norm(x - y))
    return r ** (B.d - 2) * (r * r - dx2) / dist ** B.d


def _normalize_exact(weights: np.ndarray) -> np.ndarray:
    # scale so the compensated total is exactly 1.0
    w = np.asarray(weights, dtype=float).copy()
    w /= math.fsum(w)
    for _ in range(4):
        gap = 1.0 - math.fsum(w)
        if gap == 0.0:
            break
        w[int(np.argmax(w))] += gap
    return w


def harmonic_measure_quadrature(B: BallDomain, x, n: int) -> DiscreteMeasure:
    """Atomic approximation of harmonic measure of B seen from x.

    Nodes are the deterministic sphere families of the sampling module
    (uniform angles in 2d, Fibonacci points in 3d); weights are proportional
    to the boundary density and normalized to total mass exactly 1.  In 1d
    the two-point harmonic measure is exact and n is ignored.
    """
    x = _require_interior(B, x)
    if B.d == 1:
        c, r = float(B.center[0]), B.radius
        a = float(x[0]) - c
        w_hi = (r + a) / (2.0 * r)
        w_lo = (r - a) / (2.0 * r)
        return DiscreteMeasure.from_atoms(
            1, [((c + r,), w_hi), ((c - r,), w_lo)]
        )
    if n < 8:
        raise ValueError("need at least 8 quadrature nodes")
    nodes = sphere_points(B.center, B.radius, n)
    dens = np.array([poisson_density(B, x, yj) for yj in nodes])
    weights = _normalize_exact(dens)
    return DiscreteMeasure.from_atoms(B.d, zip(nodes, weights))


def green_ball(B: BallDomain, x, y) -> float:
    """Green function of the ball with pole x, extended by zero outside.

    g(x, x) = +inf by convention; g is symmetric inside, vanishes on the
    boundary sphere and outside, and is nonnegative everywhere.
    """
    x = _require_interior(B, x)
    y = np.asarray(y, dtype=float)
    if y.shape != (B.d,):
        raise ValueError(f"point must have shape ({B.d},)")
    r = B.radius
    u = x - B.center
    v = y - B.center
    if float(np.linalg.norm(v)) > r:
        return 0.0
    dist = float(np.linalg.norm(y - x))
    scale = max(1.0, float(np.max(np.abs(x))), float(np.max(np.abs(y))))
    if dist < 1e-14 * scale:
        return math.inf
    uu = float(u @ u)
    vv = float(v @ v)
    uv = float(u @ v)
    t = math.sqrt(max(0.0, uu * vv - 2.0 * r * r * uv + r ** 4)) / r
    val = radial_kernel(B.d - 2, t) - radial_kernel(B.d - 2, dist)
    return max(0.0, val)


def _grid_complement_distance(g: GridOpenSet):
    """Exact distance from interior points to the complement of a grid set.

    The complement is the frame beyond the array box plus every non-inside
    cell box.  Candidate boxes are found through a KD-tree over non-inside
    cell centers: the nearest center distance bounds the box distance from
    above, and any box farther than that plus half a cell diagonal cannot
    win.
    """
    from scipy.spatial import cKDTree

    lo = g.origin
    hi = g.origin + g.spacing * np.asarray(g.shape, dtype=float)
    outside = ~g.inside
    centers = (
        np.column_stack(np.nonzero(outside)).astype(float) + 0.5
    ) * g.spacing + g.origin
    tree = cKDTree(centers) if len(centers) else None
    half_diag = 0.5 * g.spacing * math.sqrt(g.d)

    def nearest(p: np.ndarray):
        frame_gap = float(min(np.min(p - lo), np.min(hi - p)))
        best_d, best_q = frame_gap, None
        if tree is not None:
            center_dist, _ = tree.query(p)
            idx = tree.query_ball_point(p, center_dist + half_diag + 1e-12)
            for i in idx:
                cell_lo = centers[i] - 0.5 * g.spacing
                q = np.clip(p, cell_lo, cell_lo + g.spacing)
                dq = float(np.linalg.norm(p - q))
                if dq < best_d:
                    best_d, best_q = dq, q
        if best_q is None:
            # project onto the nearest frame face
            k = int(np.argmin(np.minimum(p - lo, hi - p)))
            q = p.copy()
            q[k] = lo[k] if p[k] - lo[k] <= hi[k] - p[k] else hi[k]
            best_q = q
        return best_d, best_q

    return nearest


def walk_on_spheres(domain, x, cfg: WosConfig) -> DiscreteMeasure:
    """Empirical exit measure of Brownian motion from x, by walk-on-spheres.

    domain is a BallDomain or a GridOpenSet.  Each walk jumps to a uniform
    point of the largest sphere inside the domain until it enters the
    epsilon shell of the boundary, then exits at the nearest boundary point.
    Exit points are snapped to an epsilon-sized lattice so that coincident
    exits merge; every sample carries weight 1/n_samples and the total mass
    is exactly 1.  Walks exceeding max_steps restart (drawing from the same
    per-sample stream) and are counted; more than 1 percent restarts raises
    WalkRestartOverflow.
    """
    if isinstance(domain, BallDomain):
        d = domain.d
        inradius = domain.radius
        center = domain.center

        def dist_fn(p):
            gap = domain.radius - float(np.linalg.norm(p - center))
            return gap, None

        def exit_point(p):
            rel = p - center
            norm = float(np.linalg.norm(rel))
            if norm == 0.0:
                rel = np.zeros(d)
                rel[0] = 1.0
                norm = 1.0
            return center + rel * (domain.radius / norm)

    elif isinstance(domain, GridOpenSet):
        d = domain.d
        nearest = _grid_complement_distance(domain)
        # inradius proxy: deepest cell center
        from scipy import ndimage as _ndi

        edt = _ndi.distance_transform_edt(domain.inside) * domain.spacing
        inradius = float(np.max(edt))
        dist_fn = nearest
        exit_point = None  # dist_fn already reports the nearest boundary point

    else:
        raise TypeError("domain must be a BallDomain or GridOpenSet")

    x = np.asarray(x, dtype=float)
    if x.shape != (d,):
        raise ValueError(f"start point must have shape ({d},)")
    gap0, _ = dist_fn(x)
    if gap0 <= 0.0:
        raise ValueError("start point must lie inside the domain")

    eps = cfg.epsilon_shell if cfg.epsilon_shell is not None else 1e-4 * inradius
    if eps <= 0.0:
        raise ValueError("epsilon shell must be positive")
    if eps >= inradius:
        raise ValueError(
            f"epsilon shell {eps} must be below the domain inradius {inradius}"
        )
    n = int(cfg.n_samples)
    if n < 1:
        raise ValueError("need n_samples >= 1")

    exits = np.empty((n, d))
    restarts = 0
    for i in range(n):
        rng = np.random.default_rng((int(cfg.seed), i))
        while True:  # restart loop
            p = x.copy()
            done = False
            for _ in range(cfg.max_steps):
                gap, q = dist_fn(p)
                if gap < eps:
                    exits[i] = exit_point(p) if q is None else q
                    done = True
                    break
                if d == 1:
                    step = 1.0 if rng.random() < 0.5 else -1.0
                    p = p + np.array([gap * step])
                elif d == 2:
                    theta = 2.0 * math.pi * rng.random()
                    p = p + gap * np.array([math.cos(theta), math.sin(theta)])
                else:
                    vec = rng.normal(size=3)
                    norm = float(np.linalg.norm(vec))
                    while norm == 0.0:
                        vec = rng.normal(size=3)
                        norm = float(np.linalg.norm(vec))
                    p = p + vec * (gap / norm)
            if done:
                break
            restarts += 1
            if restarts > 0.01 * n:
                raise WalkRestartOverflow(
                    f"{restarts} restarted walks out of {n} samples"
                )
    snapped = np.round(exits / eps) * eps
    weights = np.full(n, 1.0 / n)
    mu = DiscreteMeasure.from_atoms(d, zip(snapped, weights))
    # merging cannot change the total; renormalize the largest atom so the
    # compensated total is exactly 1
    w = _normalize_exact(mu.weights)
    return DiscreteMeasure.from_atoms(d, zip(mu.locations, w))

"""Residual evaluators for Poisson-Jensen style identities.

Every evaluator returns a PJReport comparing a left and a right side of an
identity built from finite sums: boundary quadratures, Green terms, and
potentials of atomic measures.  When both sides are -inf (the evaluation
point carries a positive atom of the function), the report flags that case
and counts it as verified: the infinity is established structurally, by
locating the atom at a pole of the kernel or Green term, never through
numeric overflow.

CanonicalSubharmonic is the function class used throughout: a positive
atomic potential inside a declared region, plus a signed atomic potential
whose sources lie strictly outside that region (hence harmonic on it), plus
a constant.  Its distributional mass measure inside the region is exactly
the atom measure, which is what makes residual checks exact up to
quadrature.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .classical_domains import BallDomain, green_ball, harmonic_measure_quadrature
from .geometry import Box, CellSet, GridOpenSet, inward_fill, rasterize_support
from .kernels import InfinityConflictError, ext_sum, spatial_kernel
from .measures import DiscreteMeasure
from .potentials import potential_values

__all__ = [
    "CanonicalSubharmonic",
    "PJReport",
    "eval_subharmonic",
    "classical_pj_residual",
    "symmetric_pj_residual",
    "measure_pj_residual",
    "asj_pj_residual",
    "asp_pj_residual",
]

#: atoms closer than this to a cell face are rejected wherever membership in
#: a cell set decides which sums they enter
CELL_EDGE_TOL = 1e-9


@dataclass(frozen=True)
class CanonicalSubharmonic:
    """atoms-potential + external-sources-potential + constant.

    atoms: positive measure supported in region (the mass measure of the
    function there).  sources: signed measure strictly outside region.
    """

    d: int
    atoms: DiscreteMeasure
    sources: DiscreteMeasure
    constant: float
    region: Box

    def __post_init__(self):
        if self.atoms.d != self.d or self.sources.d != self.d:
            raise ValueError("measure dimensions must match d")
        if len(self.region.lo) != self.d:
            raise ValueError("region dimension must match d")
        if np.any(self.atoms.weights <= 0.0):
            raise ValueError("atom weights must be positive")
        for loc in self.atoms.locations:
            if not self.region.contains(loc):
                raise ValueError(f"atom at {loc.tolist()} is outside the region")
        for loc in self.sources.locations:
            if self.region.contains(loc):
                raise ValueError(
                    f"source at {loc.tolist()} must lie strictly outside the region"
                )
        object.__setattr__(self, "constant", float(self.constant))

    def evaluate_many(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        a = potential_values(self.atoms, pts)
        b = potential_values(self.sources, pts)
        with np.errstate(invalid="ignore"):
            total = a + b + self.constant
        if np.any(np.isnan(total)):
            raise InfinityConflictError("+inf and -inf met in evaluation")
        return total

    def evaluate(self, y) -> float:
        return float(self.evaluate_many(np.asarray(y, dtype=float).reshape(1, -1))[0])

    def to_json_dict(self) -> dict:
        return {
            "d": self.d,
            "atoms": self.atoms.to_json_dict(),
            "sources": self.sources.to_json_dict(),
            "constant": self.constant,
            "region": {
                "lo": [float(c) for c in self.region.lo],
                "hi": [float(c) for c in self.region.hi],
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @classmethod
    def from_json_dict(cls, data: dict) -> "CanonicalSubharmonic":
        return cls(
            d=int(data["d"]),
            atoms=DiscreteMeasure.from_json_dict(data["atoms"]),
            sources=DiscreteMeasure.from_json_dict(data["sources"]),
            constant=float(data["constant"]),
            region=Box(
                np.asarray(data["region"]["lo"], dtype=float),
                np.asarray(data["region"]["hi"], dtype=float),
            ),
        )

    @classmethod
    def from_json(cls, text: str) -> "CanonicalSubharmonic":
        return cls.from_json_dict(json.loads(text))


def eval_subharmonic(u: CanonicalSubharmonic, y) -> float:
    """Extended-real value of u at y."""
    return u.evaluate(y)


@dataclass(frozen=True)
class PJReport:
    lhs: float
    rhs: float
    residual: float
    both_neg_inf: bool = False

    def to_json_dict(self) -> dict:
        def enc(v):
            return v if math.isfinite(v) else repr(v)

        return {
            "lhs": enc(self.lhs),
            "rhs": enc(self.rhs),
            "residual": enc(self.residual),
            "both_neg_inf": self.both_neg_inf,
        }


def _finish_report(lhs: float, rhs: float) -> PJReport:
    if lhs == -math.inf and rhs == -math.inf:
        return PJReport(lhs=lhs, rhs=rhs, residual=0.0, both_neg_inf=True)
    if math.isinf(lhs) or math.isinf(rhs):
        return PJReport(lhs=lhs, rhs=rhs, residual=math.inf)
    return PJReport(lhs=lhs, rhs=rhs, residual=abs(lhs - rhs))


def _ext_weighted_sum(weights, values) -> float:
    """Sum of w * v over pairs, in extended reals (zero weights never occur)."""
    terms = []
    for w, v in zip(weights, values):
        w = float(w)
        v = float(v)
        if math.isinf(v):
            terms.append(math.inf if (v > 0) == (w > 0) else -math.inf)
        else:
            terms.append(w * v)
    return ext_sum(terms)


def _boundary_clearance(B: BallDomain, n_quad: int) -> float:
    # quadrature breaks down when a singularity of the integrand sits within
    # about a node spacing of the sphere; require ten radial resolutions
    if B.d == 1:
        return 1e-12 * B.radius
    return 10.0 * B.radius * n_quad ** (-1.0 / (B.d - 1))


def classical_pj_residual(
    u: CanonicalSubharmonic, B: BallDomain, x, n_quad: int
) -> PJReport:
    """Residual of the ball identity

        u(x) = (boundary quadrature of u against harmonic measure from x)
               - sum over atoms a in the closed ball of weight(a) * g(x, a).

    Requires the closed ball inside u's region, x strictly interior, and
    every atom of u at least the boundary clearance away from the sphere
    (atoms straddling the sphere make the boundary quadrature ambiguous).
    """
    if u.d != B.d:
        raise ValueError("dimension mismatch")
    x = np.asarray(x, dtype=float)
    if not B.contains(x):
        raise ValueError("x must lie strictly inside the ball")
    ball_box = Box(B.center - B.radius, B.center + B.radius)
    if not (u.region.contains(ball_box.lo) and u.region.contains(ball_box.hi)):
        raise ValueError("the closed ball must sit inside u's region")
    clearance = _boundary_clearance(B, n_quad)
    if u.atoms.n_atoms:
        gaps = np.abs(
            np.linalg.norm(u.atoms.locations - B.center, axis=1) - B.radius
        )
        if np.any(gaps < clearance):
            raise ValueError(
                "an atom of u straddles the boundary sphere "
                f"(needs clearance {clearance:g})"
            )

    omega = harmonic_measure_quadrature(B, x, n_quad)
    boundary_vals = u.evaluate_many(omega.locations)
    quad_part = _ext_weighted_sum(omega.weights, boundary_vals)

    green_terms = []
    for loc, w in zip(u.atoms.locations, u.atoms.weights):
        if float(np.linalg.norm(loc - B.center)) <= B.radius:
            g = green_ball(B, x, loc)
            green_terms.append(math.inf if math.isinf(g) else w * g)
    green_part = ext_sum(green_terms)

    lhs = u.evaluate(x)
    rhs = ext_sum([quad_part, -green_part])
    return _finish_report(lhs, rhs)


def _strict_cell(g: GridOpenSet, loc) -> tuple:
    """Cell of an atom, rejecting atoms within CELL_EDGE_TOL of a cell face."""
    cell = g.cell_of_point(loc)
    frac = (np.asarray(loc, dtype=float) - g.origin) / g.spacing - np.asarray(cell)
    edge_gap = float(np.min(np.minimum(frac, 1.0 - frac))) * g.spacing
    if edge_gap < CELL_EDGE_TOL:
        raise ValueError(
            f"atom at {np.asarray(loc).tolist()} sits within {CELL_EDGE_TOL:g} "
            "of a cell boundary; membership would be ambiguous"
        )
    return cell


def _restrict_to_cells(g: GridOpenSet, mu: DiscreteMeasure, cells: CellSet):
    kept_locs, kept_w = [], []
    for loc, w in zip(mu.locations, mu.weights):
        if _strict_cell(g, loc) in cells:
            kept_locs.append(loc)
            kept_w.append(w)
    return np.asarray(kept_locs, dtype=float).reshape(len(kept_w), g.d), np.asarray(
        kept_w, dtype=float
    )


def symmetric_pj_residual(
    u: CanonicalSubharmonic,
    q: CanonicalSubharmonic,
    p: CanonicalSubharmonic,
    S_cells: CellSet,
    g: GridOpenSet,
    hypothesis_tol: float = 1e-9,
) -> PJReport:
    """Residual of the symmetric exchange identity over the cell set S:

        int_S u d(mass of q) + int_S p d(mass of u)
      = int_S u d(mass of p) + int_S q d(mass of u).

    The premise that q equals p off S is verified first at every grid cell
    center outside S, within hypothesis_tol; a violation is an error, not a
    residual.  All four integrals are finite sums over atoms restricted to S
    by cell membership.
    """
    if not (u.d == q.d == p.d == g.d):
        raise ValueError("dimension mismatch")
    for f, name in ((q, "q"), (p, "p")):
        for loc in f.atoms.locations:
            if _strict_cell(g, loc) not in S_cells:
                raise ValueError(f"an atom of {name} lies outside S_cells")
    for loc in u.atoms.locations:
        cell = g.cell_of_point(loc)
        if not g.inside[cell]:
            raise ValueError("an atom of u lies outside the grid open set")

    outside = g.all_cells().difference(S_cells)
    if len(outside):
        pts = outside.centers()
        gap = np.max(np.abs(q.evaluate_many(pts) - p.evaluate_many(pts)))
        if not float(gap) <= hypothesis_tol:
            raise ValueError(
                f"hypothesis violated: |q - p| = {float(gap):.3e} off S exceeds "
                f"{hypothesis_tol:g}"
            )

    uS_locs, uS_w = _restrict_to_cells(g, u.atoms, S_cells)
    q_locs, q_w = _restrict_to_cells(g, q.atoms, S_cells)
    p_locs, p_w = _restrict_to_cells(g, p.atoms, S_cells)

    lhs_terms = []
    if len(q_w):
        lhs_terms.append(_ext_weighted_sum(q_w, u.evaluate_many(q_locs)))
    if len(uS_w):
        lhs_terms.append(_ext_weighted_sum(uS_w, p.evaluate_many(uS_locs)))
    rhs_terms = []
    if len(p_w):
        rhs_terms.append(_ext_weighted_sum(p_w, u.evaluate_many(p_locs)))
    if len(uS_w):
        rhs_terms.append(_ext_weighted_sum(uS_w, q.evaluate_many(uS_locs)))
    return _finish_report(ext_sum(lhs_terms), ext_sum(rhs_terms))


def measure_pj_residual(
    u: CanonicalSubharmonic,
    delta: DiscreteMeasure,
    omega: DiscreteMeasure,
    B_cells: CellSet,
    g: GridOpenSet,
) -> PJReport:
    """Residual of the measure-form identity over a cell region B:

        int u d(delta) + int_B pt_omega d(mass of u)
      = int u d(omega) + int_B pt_delta d(mass of u).

    B must contain the filled support hull of (delta, omega) and be
    relatively compact in g, and u's region must cover B.
    """
    from .geometry import is_relatively_compact

    if not (u.d == delta.d == omega.d == g.d):
        raise ValueError("dimension mismatch")
    S_O = inward_fill(g, rasterize_support(g, [delta, omega]))
    if not S_O.issubset(B_cells):
        raise ValueError("B_cells must contain the filled support hull")
    if not is_relatively_compact(g, B_cells):
        raise ValueError("B_cells must be relatively compact in the grid")
    if len(B_cells):
        centers = B_cells.centers()
        pad = 0.5 * g.spacing
        b_lo = centers.min(axis=0) - pad
        b_hi = centers.max(axis=0) + pad
        if not (u.region.contains(b_lo) and u.region.contains(b_hi)):
            raise ValueError("u's region must cover the cell region B")

    uB_locs, uB_w = _restrict_to_cells(g, u.atoms, B_cells)
    lhs_terms = [_ext_weighted_sum(delta.weights, u.evaluate_many(delta.locations))]
    rhs_terms = [_ext_weighted_sum(omega.weights, u.evaluate_many(omega.locations))]
    if len(uB_w):
        lhs_terms.append(_ext_weighted_sum(uB_w, potential_values(omega, uB_locs)))
        rhs_terms.append(_ext_weighted_sum(uB_w, potential_values(delta, uB_locs)))
    return _finish_report(ext_sum(lhs_terms), ext_sum(rhs_terms))


def _as_identity_report(
    u: CanonicalSubharmonic, omega: DiscreteMeasure, x: np.ndarray
) -> PJReport:
    # u(x) = int u d(omega) - sum_a w_a * (pt_omega(a) - K(a, x))
    lhs = u.evaluate(x)
    boundary = _ext_weighted_sum(omega.weights, u.evaluate_many(omega.locations))
    terms = []
    for loc, w in zip(u.atoms.locations, u.atoms.weights):
        pot = float(potential_values(omega, loc.reshape(1, -1))[0])
        ker = spatial_kernel(u.d, loc, x)
        # the sweep potential at the atom; -inf meets +inf only if the atom
        # sits both at the pole and on supp omega, which ext_sum rejects
        v = ext_sum([pot, -ker])
        if math.isinf(v):
            terms.append(math.inf if (v > 0) == (w > 0) else -math.inf)
        else:
            terms.append(w * v)
    swept = ext_sum(terms)
    rhs = ext_sum([boundary, -swept])
    return _finish_report(lhs, rhs)


def asj_pj_residual(
    u: CanonicalSubharmonic,
    omega: DiscreteMeasure,
    x,
    g: GridOpenSet,
    balayage_tol: float = 1e-3,
) -> PJReport:
    """Residual of the Jensen-measure identity

        u(x) = int u d(omega) - int (pt_omega - K(., x)) d(mass of u).

    The premise that omega sweeps the point mass at x (harmonic balayage on
    g at balayage_tol) is verified first; failure is an error.
    """
    from .balayage import check_har_balayage
    from .measures import dirac

    x = np.asarray(x, dtype=float)
    premise = check_har_balayage(dirac(x), omega, g, balayage_tol)
    if not premise.verdict:
        raise ValueError(
            "omega is not a harmonic balayage of the point mass at x on this grid "
            f"(potential residual {premise.potential_residual:.3e}, "
            f"mass gap {premise.mass_gap:.3e})"
        )
    return _as_identity_report(u, omega, x)


def asp_pj_residual(
    u: CanonicalSubharmonic,
    V,
    x,
    g: GridOpenSet,
    balayage_tol: float = 1e-3,
) -> PJReport:
    """Same identity as asj_pj_residual, taking the sweep potential object.

    V must be a potential with pole x and base measure omega (see the
    duality module); the evaluation delegates to the identical code path, so
    the two evaluators agree bit for bit on matching inputs.
    """
    x = np.asarray(x, dtype=float)
    if not np.array_equal(np.asarray(V.pole, dtype=float), x):
        raise ValueError("V's pole does not match x")
    return asj_pj_residual(u, V.base_measure, x, g, balayage_tol)

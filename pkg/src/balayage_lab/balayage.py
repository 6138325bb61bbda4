"""Order checks between atomic measures: harmonic and subharmonic balayage.

A pair (delta, omega) is in harmonic balayage order when both measures have
the same total mass and their potentials agree away from the filled support
hull.  The subharmonic (Jensen) order additionally requires the swept
potential to dominate everywhere, at grid resolution.  The Main Lemma
harness evaluates several equivalent formulations of the order side by side
and demands that their verdicts agree whenever every residual is far from
the tolerance line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import CellSet, GridOpenSet, inward_fill, rasterize_support
from .measures import DiscreteMeasure
from .poisson_jensen import CanonicalSubharmonic, measure_pj_residual
from .potentials import potential_values
from .sampling import sphere_points

__all__ = [
    "BalayageReport",
    "EquivalenceViolation",
    "check_har_balayage",
    "check_har_test_functions",
    "check_sbh_balayage",
    "main_lemma_harness",
]

N_FAR_POINTS = 100
FAR_RING_FACTOR = 3.0


class EquivalenceViolation(RuntimeError):
    """Clear-margin residuals produced disagreeing statement verdicts."""


@dataclass(frozen=True)
class BalayageReport:
    """Residuals of the balayage statements that were evaluated.

    None means a statement was not part of the check.  verdict is True iff
    every evaluated residual is at or below tol.  conclusive is False when
    some residual falls inside the borderline band (tol/10, 10*tol), where
    statement agreement is not asserted.
    """

    tol: float
    potential_residual: float | None = None
    mass_gap: float | None = None
    har_test_residual: float | None = None
    pj_residual: float | None = None
    probe_residual: float | None = None
    sbh_deficit: float | None = None
    worst: dict = field(default_factory=dict)
    verdict: bool = True
    conclusive: bool = True

    def residuals(self) -> dict:
        out = {}
        for name in (
            "potential_residual",
            "mass_gap",
            "har_test_residual",
            "pj_residual",
            "probe_residual",
            "sbh_deficit",
        ):
            val = getattr(self, name)
            if val is not None:
                out[name] = val
        return out

    def to_json_dict(self) -> dict:
        def enc(v):
            if isinstance(v, float) and not math.isfinite(v):
                return repr(v)
            return v

        data = {k: enc(v) for k, v in self.residuals().items()}
        return {
            "tol": self.tol,
            "residuals": data,
            "worst": self.worst,
            "verdict": self.verdict,
            "conclusive": self.conclusive,
        }


def _classify(statements: dict, tol: float):
    """Per-statement verdicts plus whether every statement clears the
    borderline band (tol/10, 10*tol).

    A statement may bundle several residuals (potential agreement plus mass
    equality form one statement); it passes when all of them pass, is a
    clear pass when all sit at or below tol/10, and a clear fail when any
    reaches 10*tol.
    """
    verdicts = {}
    clear = True
    for name, residual_list in statements.items():
        verdicts[name] = all(v <= tol for v in residual_list)
        clear_pass = all(v <= tol / 10.0 for v in residual_list)
        clear_fail = any(v >= 10.0 * tol for v in residual_list)
        clear = clear and (clear_pass or clear_fail)
    return verdicts, clear


def _far_ring(g: GridOpenSet, n: int = N_FAR_POINTS) -> np.ndarray:
    box = g.box()
    return sphere_points(box.center(), FAR_RING_FACTOR * box.diameter(), n)


def _support_hull_cells(g, delta, omega) -> CellSet:
    return inward_fill(g, rasterize_support(g, [delta, omega]))


def check_har_balayage(
    delta: DiscreteMeasure, omega: DiscreteMeasure, g: GridOpenSet, tol: float
) -> BalayageReport:
    """Potential agreement off the filled support hull, plus mass equality.

    Potentials are compared at every grid cell center outside the hull and
    at a far ring of points around the grid box.
    """
    if delta.d != g.d or omega.d != g.d:
        raise ValueError("measure dimension does not match the grid")
    if np.any(delta.weights < 0.0) or np.any(omega.weights < 0.0):
        raise ValueError("balayage order is defined for positive measures")
    S_O = _support_hull_cells(g, delta, omega)
    outside = g.all_cells().difference(S_O)
    pts = np.vstack([outside.centers().reshape(-1, g.d), _far_ring(g)])
    gap = np.abs(potential_values(delta, pts) - potential_values(omega, pts))
    worst_idx = int(np.argmax(gap))
    potential_residual = float(gap[worst_idx])
    mass_gap = abs(delta.mass() - omega.mass())
    verdict = potential_residual <= tol and mass_gap <= tol
    return BalayageReport(
        tol=tol,
        potential_residual=potential_residual,
        mass_gap=mass_gap,
        worst={"potential": [float(c) for c in pts[worst_idx]]},
        verdict=verdict,
    )


def _hull_membership(points: np.ndarray):
    """Point-in-convex-hull test for the rows of points.

    Falls back to the bounding box when the points are degenerate for a
    triangulation; the box contains the hull, so the fallback only errs on
    the safe side (rejecting more).
    """
    from scipy.spatial import Delaunay, QhullError

    if len(points) == 0:
        return lambda p: False
    lo = points.min(axis=0)
    hi = points.max(axis=0)
    try:
        tri = Delaunay(points)

        def member(p):
            return bool(tri.find_simplex(np.asarray(p, dtype=float)) >= 0)

    except (QhullError, ValueError):

        def member(p):
            p = np.asarray(p, dtype=float)
            return bool(np.all(p >= lo) and np.all(p <= hi))

    return member


def check_har_test_functions(
    delta: DiscreteMeasure, omega: DiscreteMeasure, h_list, tol: float | None = None
) -> float:
    """max over the test family of |integral of h against delta - omega|.

    Each h is either a CanonicalSubharmonic (whose atoms and sources must
    avoid the convex hull of the two supports, making it harmonic there) or
    a plain callable mapping an (n, d) array to n values, which the caller
    certifies to be harmonic on the hull.  tol is carried for the caller's
    comparison and does not change the returned residual.
    """
    if delta.d != omega.d:
        raise ValueError("dimension mismatch")
    support = np.vstack([
        delta.locations.reshape(-1, delta.d),
        omega.locations.reshape(-1, omega.d),
    ])
    in_hull = _hull_membership(support)
    gaps = []
    for h in h_list:
        if isinstance(h, CanonicalSubharmonic):
            for loc in h.atoms.locations:
                if in_hull(loc):
                    raise ValueError("test function has an atom inside the hull")
            for loc in h.sources.locations:
                if in_hull(loc):
                    raise ValueError("test function has a source inside the hull")
            fn = h.evaluate_many
        else:
            fn = h
        val_d = np.asarray(fn(delta.locations.reshape(-1, delta.d)), dtype=float)
        val_o = np.asarray(fn(omega.locations.reshape(-1, omega.d)), dtype=float)
        int_d = math.fsum(w * v for w, v in zip(delta.weights, val_d))
        int_o = math.fsum(w * v for w, v in zip(omega.weights, val_o))
        gaps.append(abs(int_d - int_o))
    return max(gaps) if gaps else 0.0


def check_sbh_balayage(
    delta: DiscreteMeasure, omega: DiscreteMeasure, g: GridOpenSet, tol: float
) -> BalayageReport:
    """Harmonic balayage check plus the one-sided potential inequality.

    On top of check_har_balayage, requires pt_omega >= pt_delta - tol at
    every grid cell center.  The deficit max(0, pt_delta - pt_omega) is
    reported; points where pt_delta is -inf satisfy the inequality trivially.
    """
    har = check_har_balayage(delta, omega, g, tol)
    centers = g.all_cells().centers()
    pot_d = potential_values(delta, centers)
    pot_o = potential_values(omega, centers)
    with np.errstate(invalid="ignore"):
        diff = pot_d - pot_o
    diff = np.where(np.isnan(diff), -math.inf, diff)  # both sides -inf: equal
    worst_idx = int(np.argmax(diff))
    deficit = max(0.0, float(diff[worst_idx]))
    worst = dict(har.worst)
    worst["sbh"] = [float(c) for c in centers[worst_idx]]
    return BalayageReport(
        tol=tol,
        potential_residual=har.potential_residual,
        mass_gap=har.mass_gap,
        sbh_deficit=deficit,
        worst=worst,
        verdict=har.verdict and deficit <= tol,
    )


def _default_test_family(g: GridOpenSet, n_random: int, seed: int):
    """Harmonic test functions: constant, coordinates, and random kernel
    combinations with sources on a ring far outside the grid box."""
    from .kernels import radial_kernel

    box = g.box()
    fns = [lambda pts: np.ones(len(pts))]
    for k in range(g.d):
        fns.append(lambda pts, k=k: np.asarray(pts)[:, k])
    rng = np.random.default_rng(seed)
    ring = sphere_points(box.center(), 2.0 * box.diameter(), 16)
    for _ in range(n_random):
        coeff = rng.normal(size=len(ring))
        coeff /= np.sum(np.abs(coeff))

        def combo(pts, coeff=coeff):
            pts = np.asarray(pts, dtype=float)
            dist = np.linalg.norm(pts[:, None, :] - ring[None, :, :], axis=2)
            return radial_kernel(g.d - 2, dist) @ coeff

        fns.append(combo)
    return fns


def main_lemma_harness(
    delta: DiscreteMeasure,
    omega: DiscreteMeasure,
    g: GridOpenSet,
    u_list,
    tol: float,
    n_probe_points: int = 50,
    n_test_functions: int = 8,
    seed: int = 0,
) -> BalayageReport:
    """Evaluate the equivalent balayage statements side by side.

    Statements covered: integration of harmonic test functions, potential
    agreement off the filled hull plus mass equality, the measure-form
    exchange identity for each u in u_list, and the exchange identity for
    kernel probes u = K(., x) at points x off the hull (which reduces to
    potential agreement at those points).

    When every residual is outside the borderline band (tol/10, 10*tol) the
    verdicts must agree; disagreement raises EquivalenceViolation.  With any
    residual inside the band the report is marked inconclusive instead.
    """
    har = check_har_balayage(delta, omega, g, tol)

    fns = _default_test_family(g, n_test_functions, seed)
    har_test_residual = check_har_test_functions(delta, omega, fns)

    pj_residual = 0.0
    worst = dict(har.worst)
    S_O = _support_hull_cells(g, delta, omega)
    for i, u in enumerate(u_list):
        rep = measure_pj_residual(u, delta, omega, S_O, g)
        if rep.residual > pj_residual:
            pj_residual = rep.residual
            worst["pj"] = i

    outside_sorted = g.all_cells().difference(S_O).sorted_cells()
    stride = max(1, len(outside_sorted) // max(1, n_probe_points))
    probe_pts = g.cell_centers(outside_sorted[::stride][:n_probe_points])
    gap = np.abs(
        potential_values(delta, probe_pts) - potential_values(omega, probe_pts)
    )
    probe_residual = float(np.max(gap)) if len(gap) else 0.0

    statements = {
        "har_test": [har_test_residual],
        "potential_and_mass": [har.potential_residual, har.mass_gap],
    }
    # channels with nothing sampled are left out of the comparison
    if u_list:
        statements["measure_pj"] = [pj_residual]
    if len(gap):
        statements["kernel_probe"] = [probe_residual]
    verdicts, clear = _classify(statements, tol)
    if clear and len(set(verdicts.values())) > 1:
        raise EquivalenceViolation(
            "clear-margin statements disagree on the verdict: "
            f"{dict(sorted(verdicts.items()))!r} from {statements!r}"
        )
    return BalayageReport(
        tol=tol,
        potential_residual=har.potential_residual,
        mass_gap=har.mass_gap,
        har_test_residual=har_test_residual,
        pj_residual=pj_residual,
        probe_residual=probe_residual,
        worst=worst,
        verdict=all(verdicts.values()),
        conclusive=clear,
    )

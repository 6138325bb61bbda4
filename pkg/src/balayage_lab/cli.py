"""Scenario runner and fixture generator.

`balayage-lab run config.json [--out report.json] [--seed N] [--csv table.csv]`
loads a scenario config, evaluates its residuals, writes a JSON report, and
exits 0 (all residuals within tolerance), 1 (verification failure), 2 (config
error, including scenarios that evaluate no residuals at all), or 3 (internal
numeric fault: an infinity clash or a walk restart overflow).

`balayage-lab fixture KIND --seed N --out DIR` writes a deterministic fixture
(grid mask, measure, or canonical subharmonic) to DIR.

Config schema:
    {"kind": str, "seed": int, "params": {...}, "tolerances": {...}}
Unknown keys in params are rejected.  Reports are byte-identical across runs
of the same config and seed; wall time goes to stderr only, so it never
perturbs the report bytes.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from .balayage import EquivalenceViolation, check_har_balayage, check_sbh_balayage, main_lemma_harness
from .classical_domains import (
    BallDomain,
    WalkRestartOverflow,
    WosConfig,
    harmonic_measure_quadrature,
    walk_on_spheres,
)
from .duality import forward_map, inverse_map, mfs_fit, ring_sources
from .geometry import (
    Box,
    CellSet,
    GridOpenSet,
    components,
    full_box_grid,
    inward_fill,
    load_mask,
    rasterize_support,
    save_mask,
)
from .kernels import InfinityConflictError
from .measures import DiscreteMeasure, dirac
from .poisson_jensen import (
    CanonicalSubharmonic,
    classical_pj_residual,
    measure_pj_residual,
    symmetric_pj_residual,
)
from .sampling import sphere_points

__all__ = ["main"]

FIXTURE_KINDS = ("grid-annulus", "grid-blob", "random-measure", "random-subharmonic")

_MAX_SEED = 2 ** 64


def _jsonable(obj):
    """Recursively convert to strict-JSON values; non-finite floats become
    their repr strings so the report stays parseable everywhere."""
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else repr(f)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _dump_json(data, path: Path) -> None:
    text = json.dumps(_jsonable(data), sort_keys=True, indent=2) + "\n"
    path.write_text(text, encoding="utf-8", newline="\n")


# ---------------------------------------------------------------------------
# config helpers


def _rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def _take(params: dict, key: str, default):
    return params[key] if key in params else default

def _check_keys(params: dict, allowed) -> None:
    extra = set(params) - set(allowed)
    if extra:
        raise ValueError(f"unknown params: {sorted(extra)}")


def _ball_from(params: dict, d: int) -> BallDomain:
    center = np.asarray(_take(params, "center", [0.0] * d), dtype=float)
    radius = float(_take(params, "radius", 1.0))
    return BallDomain(d, center, radius)


def _grid_from(spec, default_lo, default_hi, default_n) -> GridOpenSet:
    if isinstance(spec, str):
        return load_mask(spec)
    if spec is None:
        return full_box_grid(default_lo, default_hi, default_n)
    return full_box_grid(
        np.asarray(spec["lo"], dtype=float),
        np.asarray(spec["hi"], dtype=float),
        int(spec["n_cells"]),
    )


def _measure_from(spec) -> DiscreteMeasure:
    if isinstance(spec, str):
        return DiscreteMeasure.from_json(Path(spec).read_text())
    return DiscreteMeasure.from_json_dict(spec)


def _subharmonic_from(spec) -> CanonicalSubharmonic:
    if isinstance(spec, str):
        return CanonicalSubharmonic.from_json(Path(spec).read_text())
    return CanonicalSubharmonic.from_json_dict(spec)


def _ball_point(rng: np.random.Generator, d: int, radius: float) -> np.ndarray:
    """One point uniform in the d-ball of the given radius."""
    v = rng.standard_normal(d)
    v /= np.linalg.norm(v)
    return radius * rng.uniform() ** (1.0 / d) * v


def _random_subharmonic(
    rng: np.random.Generator,
    d: int,
    region: Box,
    atom_center,
    atom_radius: float,
    n_atoms: int,
    n_sources: int,
    source_radius: float,
) -> CanonicalSubharmonic:
    atom_center = np.asarray(atom_center, dtype=float)
    atoms = [
        (atom_center + _ball_point(rng, d, atom_radius), rng.uniform(0.2, 1.0))
        for _ in range(n_atoms)
    ]
    ring = sphere_points(region.center(), source_radius, max(n_sources, 1))
    sources = [(ring[j], rng.uniform(0.2, 1.0) * rng.choice([-1.0, 1.0]))
               for j in range(n_sources)]
    return CanonicalSubharmonic(
        d=d,
        atoms=DiscreteMeasure.from_atoms(d, atoms),
        sources=DiscreteMeasure.from_atoms(d, sources),
        constant=float(rng.uniform(-1.0, 1.0)),
        region=region,
    )


# ---------------------------------------------------------------------------
# scenarios: each returns (residuals, default_tolerances, details)


def _scn_pj_classical(params: dict, tolerances: dict, seed: int):
    _check_keys(params, {"d", "center", "radius", "n_quad", "n_atoms", "n_sources", "u", "pole"})
    rng = _rng(seed)
    d = int(_take(params, "d", 2))
    ball = _ball_from(params, d)
    n_quad = int(_take(params, "n_quad", 512))
    region = Box(ball.center - 3.0 * ball.radius, ball.center + 3.0 * ball.radius)
    if "u" in params:
        u = _subharmonic_from(params["u"])
    else:
        u = _random_subharmonic(
            rng, d, region, ball.center, 0.8 * ball.radius,
            int(_take(params, "n_atoms", 5)), int(_take(params, "n_sources", 3)),
            6.0 * ball.radius,
        )
    if "pole" in params:
        x = np.asarray(params["pole"], dtype=float)
    else:
        while True:
            x = ball.center + _ball_point(rng, d, 0.5 * ball.radius)
            if u.atoms.n_atoms == 0:
                break
            if np.min(np.linalg.norm(u.atoms.locations - x, axis=1)) > 0.05 * ball.radius:
                break
    rep = classical_pj_residual(u, ball, x, n_quad)
    residuals = {"pj_residual": rep.residual}
    details = {"report": rep.to_json_dict(), "pole": x.tolist(), "n_quad": n_quad}
    return residuals, {"pj_residual": 1e-3}, details


def _scn_pj_symmetric(params: dict, tolerances: dict, seed: int):
    _check_keys(params, {"mode", "n_quad", "grid", "hypothesis_tol"})
    rng = _rng(seed)
    d = 2
    g = _grid_from(_take(params, "grid", None), [-1.4] * d, [1.4] * d, 40)
    center = rng.uniform(-0.02, 0.02, d)
    ball = BallDomain(d, center, 0.7)
    region = g.box()
    src_radius = 4.0 * region.diameter()
    mode = _take(params, "mode", "identical")
    shared_sources = DiscreteMeasure.from_atoms(
        d,
        [(p, rng.uniform(0.2, 1.0) * rng.choice([-1.0, 1.0]))
         for p in sphere_points(region.center(), src_radius, 4)],
    )
    constant = float(rng.uniform(-1.0, 1.0))
    u = _random_subharmonic(rng, d, region, center, 0.5 * ball.radius, 3, 3, src_radius)
    if mode == "identical":
        atoms = DiscreteMeasure.from_atoms(
            d, [(center + _ball_point(rng, d, 0.55 * ball.radius), rng.uniform(0.2, 1.0))
                for _ in range(4)],
        )
        q = CanonicalSubharmonic(d=d, atoms=atoms, sources=shared_sources,
                                 constant=constant, region=region)
        p = q
    elif mode == "swept":
        omega = harmonic_measure_quadrature(ball, center, int(_take(params, "n_quad", 512)))
        q = CanonicalSubharmonic(d=d, atoms=dirac(center), sources=shared_sources,
                                 constant=constant, region=region)
        p = CanonicalSubharmonic(d=d, atoms=omega, sources=shared_sources,
                                 constant=constant, region=region)
    else:
        raise ValueError(f"unknown mode {mode!r}; expected 'identical' or 'swept'")
    S = inward_fill(g, rasterize_support(g, [q.atoms, p.atoms]))
    rep = symmetric_pj_residual(
        u, q, p, S, g, hypothesis_tol=float(_take(params, "hypothesis_tol", 1e-9))
    )
    residuals = {"pj_residual": rep.residual}
    details = {"report": rep.to_json_dict(), "mode": mode, "n_S_cells": len(S)}
    return residuals, {"pj_residual": 1e-3}, details


def _scn_pj_measure(params: dict, tolerances: dict, seed: int):
    _check_keys(params, {"n_quad", "grid", "n_atoms"})
    rng = _rng(seed)
    d = 2
    g = _grid_from(_take(params, "grid", None), [-1.4] * d, [1.4] * d, 40)
    center = rng.uniform(-0.02, 0.02, d)
    ball = BallDomain(d, center, 0.7)
    x = center + _ball_point(rng, d, 0.2 * ball.radius)
    delta = dirac(x)
    omega = harmonic_measure_quadrature(ball, x, int(_take(params, "n_quad", 512)))
    pad = g.spacing
    region = Box(g.box().lo - pad, g.box().hi + pad)
    u = _random_subharmonic(
        rng, d, region, center, 0.6 * ball.radius,
        int(_take(params, "n_atoms", 3)), 3, 4.0 * region.diameter(),
    )
    B = inward_fill(g, rasterize_support(g, [delta, omega]))
    rep = measure_pj_residual(u, delta, omega, B, g)
    residuals = {"pj_residual": rep.residual}
    details = {"report": rep.to_json_dict(), "n_B_cells": len(B)}
    return residuals, {"pj_residual": 1e-3}, details


def _scn_main_lemma(params: dict, tolerances: dict, seed: int):
    _check_keys(params, {"n_quad", "grid", "n_u", "pole_offset"})
    rng = _rng(seed)
    d = 2
    g = _grid_from(_take(params, "grid", None), [-1.4] * d, [1.4] * d, 40)
    center = rng.uniform(-0.02, 0.02, d)
    ball = BallDomain(d, center, 0.7)
    x = center + np.asarray(_take(params, "pole_offset", [0.05, -0.03]), dtype=float)
    delta = dirac(x)
    omega = harmonic_measure_quadrature(ball, x, int(_take(params, "n_quad", 512)))
    region = g.box()
    u_list = [
        _random_subharmonic(rng, d, region, center, 0.5 * ball.radius, 3, 3,
                            4.0 * region.diameter())
        for _ in range(int(_take(params, "n_u", 3)))
    ]
    tol = float(tolerances.get("residual", 1e-3))
    try:
        rep = main_lemma_harness(delta, omega, g, u_list, tol, seed=seed)
    except EquivalenceViolation as exc:
        residuals = {"equivalence_violation": math.inf}
        return residuals, {"equivalence_violation": tol}, {"violation": str(exc)}
    residuals = rep.residuals()
    defaults = {name: tol for name in residuals}
    details = {"report": rep.to_json_dict()}
    return residuals, defaults, details


def _scn_balayage(params: dict, tolerances: dict, seed: int, sbh: bool):
    _check_keys(params, {"delta", "omega", "grid"})
    delta = _measure_from(params["delta"])
    omega = _measure_from(params["omega"])
    locs = np.vstack([delta.locations, omega.locations])
    lo = locs.min(axis=0)
    hi = locs.max(axis=0)
    pad = max(1.0, 0.5 * float(np.max(hi - lo)))
    side = float(np.max(hi - lo)) + 2.0 * pad
    center = 0.5 * (lo + hi)
    g = _grid_from(
        _take(params, "grid", None),
        center - 0.5 * side, center + 0.5 * side, 32,
    )
    tol = float(tolerances.get("residual", 1e-3))
    check = check_sbh_balayage if sbh else check_har_balayage
    rep = check(delta, omega, g, tol)
    residuals = rep.residuals()
    defaults = {name: tol for name in residuals}
    details = {"report": rep.to_json_dict()}
    return residuals, defaults, details


def _scn_duality_roundtrip(params: dict, tolerances: dict, seed: int):
    _check_keys(params, {"omega", "n_quad", "grid", "stencil_h", "pole", "radius", "premise_tol"})
    rng = _rng(seed)
    d = 2
    radius = float(_take(params, "radius", 1.0))
    ball = BallDomain(d, np.zeros(d), radius)
    g = _grid_from(_take(params, "grid", None), [-1.5 * radius] * d, [1.5 * radius] * d, 30)
    if "pole" in params:
        x = np.asarray(params["pole"], dtype=float)
    else:
        x = _ball_point(rng, d, 0.1 * radius)
    kind = _take(params, "omega", "quad")
    if kind == "quad":
        omega = harmonic_measure_quadrature(ball, x, int(_take(params, "n_quad", 512)))
    elif kind == "dirac":
        omega = dirac(x)
    else:
        raise ValueError(f"unknown omega kind {kind!r}; expected 'quad' or 'dirac'")
    V = forward_map(omega, x, g, tol=float(_take(params, "premise_tol", 1e-3)))
    stencil_h = float(_take(params, "stencil_h", radius / 200.0))
    rec = inverse_map(V, g, stencil_h)
    if kind == "dirac":
        gaps = np.linalg.norm(rec.locations - x, axis=1)
        near = gaps < stencil_h
        weight = float(np.sum(rec.weights[near]))
        stray = float(np.sum(np.abs(rec.weights[~near])))
        residuals = {"pole_weight_gap": abs(weight - 1.0), "stray_mass": stray}
        defaults = {"pole_weight_gap": 1e-6, "stray_mass": 1e-6}
    else:
        quadrant_gap = 0.0
        for sx in (-1.0, 1.0):
            for sy in (-1.0, 1.0):
                in_quad = lambda locs: (locs[:, 0] * sx > 0) & (locs[:, 1] * sy > 0)  # noqa: E731
                m_rec = float(np.sum(rec.weights[in_quad(rec.locations)]))
                m_ref = float(np.sum(omega.weights[in_quad(omega.locations)]))
                quadrant_gap = max(quadrant_gap, abs(m_rec - m_ref))
        residuals = {
            "total_mass_gap": abs(rec.mass() - omega.mass()),
            "quadrant_gap": quadrant_gap,
        }
        defaults = {"total_mass_gap": 1e-2, "quadrant_gap": 5e-2}
    details = {
        "recovered_atoms": rec.n_atoms,
        "recovered_mass": rec.mass(),
        "pole": x.tolist(),
        "stencil_h": stencil_h,
    }
    return residuals, defaults, details


def _scn_mfs_fit(params: dict, tolerances: dict, seed: int):
    _check_keys(params, {"target", "n_sources", "factor", "b"})
    target = _take(params, "target", "constant")
    center = np.zeros(2)
    samples = np.vstack([
        sphere_points(center, 1.0, 64),
        sphere_points(center, 0.6, 32),
        sphere_points(center, 0.25, 16),
        center.reshape(1, 2),
    ])
    if target == "constant":
        values = np.ones(len(samples))
        factor = float(_take(params, "factor", 3.0))
        b = float(_take(params, "b", 1e-2))
        m = int(_take(params, "n_sources", 16))
    elif target == "squared-real":
        values = samples[:, 0] ** 2 - samples[:, 1] ** 2
        factor = float(_take(params, "factor", 1.5))
        b = float(_take(params, "b", 1e-4))
        m = int(_take(params, "n_sources", 32))
    else:
        raise ValueError(f"unknown target {target!r}; expected 'constant' or 'squared-real'")
    fit = mfs_fit(samples, values, ring_sources(samples, m, factor), b)
    residuals = {"sup_error": fit.sup_error}
    details = {"n_sources": m, "factor": factor, "regularized": fit.regularized,
               "success": fit.success}
    return residuals, {"sup_error": b}, details


def _scn_inward_fill(params: dict, tolerances: dict, seed: int):
    _check_keys(params, {"mask", "resolution", "n_blobs"})
    rng = _rng(seed)
    if "mask" in params:
        blob = load_mask(params["mask"])
        g = GridOpenSet(blob.origin, blob.spacing, np.ones(blob.shape, dtype=bool))
        S = CellSet.from_mask(g, blob.inside)
    else:
        n_side = int(_take(params, "resolution", 64))
        g = full_box_grid([-1.0, -1.0], [1.0, 1.0], n_side)
        mask = np.zeros(g.shape, dtype=bool)
        centers = g.cell_centers(g.all_cells().sorted_cells())
        for _ in range(int(_take(params, "n_blobs", 4))):
            c = rng.uniform(-0.6, 0.6, 2)
            r = rng.uniform(0.15, 0.4)
            hit = np.linalg.norm(centers - c, axis=1) <= r
            mask.reshape(-1)[hit] = True
        if not mask.any():
            mask[g.shape[0] // 2, g.shape[1] // 2] = True
        S = CellSet.from_mask(g, mask)
    filled = inward_fill(g, S)
    refilled = inward_fill(g, filled)
    containment = 0.0 if S.issubset(filled) else 1.0
    idempotence = 0.0 if refilled.cells == filled.cells else 1.0
    band = g.frontier_band()
    leftover = g.inside & ~filled.mask()
    holes = 0.0
    for comp in components(g, CellSet.from_mask(g, leftover)):
        if not any(band[c] for c in comp.cells):
            holes += 1.0
    residuals = {
        "containment_violations": containment,
        "idempotence_violations": idempotence,
        "hole_violations": holes,
    }
    defaults = {name: 0.0 for name in residuals}
    details = {"n_S_cells": len(S), "n_filled_cells": len(filled)}
    return residuals, defaults, details


def _scn_wos_compare(params: dict, tolerances: dict, seed: int):
    _check_keys(params, {"d", "center", "radius", "pole", "n_samples", "n_quad",
                         "epsilon_shell", "max_steps"})
    rng = _rng(seed)
    d = int(_take(params, "d", 2))
    ball = _ball_from(params, d)
    if "pole" in params:
        x = np.asarray(params["pole"], dtype=float)
    else:
        x = ball.center + _ball_point(rng, d, 0.5 * ball.radius)
    n_samples = int(_take(params, "n_samples", 20_000))
    eps = params.get("epsilon_shell")
    cfg = WosConfig(n_samples=n_samples, seed=seed,
                    epsilon_shell=None if eps is None else float(eps),
                    max_steps=int(_take(params, "max_steps", 10_000)))
    nu = walk_on_spheres(ball, x, cfg)
    om = harmonic_measure_quadrature(ball, x, int(_take(params, "n_quad", 512)))

    def stats(mu: DiscreteMeasure):
        cols = [mu.locations[:, k] for k in range(d)]
        monomials = list(cols)
        for i in range(d):
            for j in range(i, d):
                monomials.append(cols[i] * cols[j])
        out = []
        for phi in monomials:
            m1 = float(np.sum(mu.weights * phi))
            m2 = float(np.sum(mu.weights * phi * phi))
            out.append((m1, max(m2 - m1 * m1, 0.0)))
        return out

    z_max = 0.0
    for (m_nu, var_nu), (m_om, _) in zip(stats(nu), stats(om)):
        sigma = math.sqrt(var_nu / n_samples)
        diff = abs(m_nu - m_om)
        if sigma == 0.0:
            z = 0.0 if diff < 1e-12 else math.inf
        else:
            z = diff / (4.0 * sigma)
        z_max = max(z_max, z)
    residuals = {"moment_z_max": z_max}
    details = {"n_samples": n_samples, "n_exit_atoms": nu.n_atoms, "pole": x.tolist()}
    return residuals, {"moment_z_max": 1.0}, details


SCENARIOS = {
    "pj-classical": _scn_pj_classical,
    "pj-symmetric": _scn_pj_symmetric,
    "pj-measure": _scn_pj_measure,
    "main-lemma": _scn_main_lemma,
    "balayage-har": lambda p, t, s: _scn_balayage(p, t, s, sbh=False),
    "balayage-sbh": lambda p, t, s: _scn_balayage(p, t, s, sbh=True),
    "duality-roundtrip": _scn_duality_roundtrip,
    "mfs-fit": _scn_mfs_fit,
    "inward-fill": _scn_inward_fill,
    "wos-compare": _scn_wos_compare,
}


# ---------------------------------------------------------------------------
# fixtures


def _fixture_grid_annulus(rng: np.random.Generator, out_dir: Path) -> list:
    n = 64
    g_full = full_box_grid([-1.0, -1.0], [1.0, 1.0], n)
    centers = g_full.cell_centers(g_full.all_cells().sorted_cells())
    r_in = rng.uniform(0.25, 0.35)
    r_out = rng.uniform(0.6, 0.8)
    dist = np.linalg.norm(centers, axis=1)
    inside = ((dist >= r_in) & (dist <= r_out)).reshape(g_full.shape)
    path = out_dir / "annulus.mask"
    save_mask(GridOpenSet(g_full.origin, g_full.spacing, inside), path)
    return [path]


def _fixture_grid_blob(rng: np.random.Generator, out_dir: Path) -> list:
    n = 64
    g_full = full_box_grid([-1.0, -1.0], [1.0, 1.0], n)
    centers = g_full.cell_centers(g_full.all_cells().sorted_cells())
    inside = np.zeros(len(centers), dtype=bool)
    for _ in range(int(rng.integers(3, 7))):
        c = rng.uniform(-0.6, 0.6, 2)
        r = rng.uniform(0.15, 0.4)
        inside |= np.linalg.norm(centers - c, axis=1) <= r
    if not inside.any():
        inside[len(inside) // 2] = True
    path = out_dir / "blob.mask"
    save_mask(GridOpenSet(g_full.origin, g_full.spacing, inside.reshape(g_full.shape)), path)
    return [path]


def _fixture_random_measure(rng: np.random.Generator, out_dir: Path) -> list:
    atoms = [(_ball_point(rng, 2, 1.0), rng.uniform(0.5, 1.5)) for _ in range(8)]
    total = math.fsum(w for _, w in atoms)
    mu = DiscreteMeasure.from_atoms(2, [(loc, w / total) for loc, w in atoms])
    path = out_dir / "measure.json"
    _dump_json(mu.to_json_dict(), path)
    return [path]


def _fixture_random_subharmonic(rng: np.random.Generator, out_dir: Path) -> list:
    region = Box(np.array([-1.0, -1.0]), np.array([1.0, 1.0]))
    u = _random_subharmonic(rng, 2, region, [0.0, 0.0], 0.8, 5, 8, 3.0)
    path = out_dir / "subharmonic.json"
    _dump_json(u.to_json_dict(), path)
    return [path]


FIXTURES = {
    "grid-annulus": _fixture_grid_annulus,
    "grid-blob": _fixture_grid_blob,
    "random-measure": _fixture_random_measure,
    "random-subharmonic": _fixture_random_subharmonic,
}


# ---------------------------------------------------------------------------
# commands


def _cmd_run(args) -> int:
    started = time.perf_counter()
    try:
        cfg = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if not isinstance(cfg, dict) or "kind" not in cfg:
        print("config error: config must be an object with a 'kind' field", file=sys.stderr)
        return 2
    kind = cfg["kind"]
    if kind not in SCENARIOS:
        print(f"config error: unknown kind {kind!r}; expected one of "
              f"{sorted(SCENARIOS)}", file=sys.stderr)
        return 2
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    if not isinstance(seed, int) or not 0 <= seed < _MAX_SEED:
        print("config error: seed must be a 64-bit unsigned integer", file=sys.stderr)
        return 2
    params = cfg.get("params", {})
    tolerances = cfg.get("tolerances", {})
    if not isinstance(params, dict) or not isinstance(tolerances, dict):
        print("config error: params and tolerances must be objects", file=sys.stderr)
        return 2

    try:
        residuals, default_tols, details = SCENARIOS[kind](params, tolerances, seed)
    except (InfinityConflictError, WalkRestartOverflow) as exc:
        print(f"numeric fault: {exc}", file=sys.stderr)
        return 3
    except KeyError as exc:
        print(f"config error: missing required param {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    if not residuals:
        print("config error: scenario evaluated zero residuals", file=sys.stderr)
        return 2

    tols = {name: float(tolerances.get(name, default_tols[name])) for name in residuals}
    verdicts = {name: bool(residuals[name] <= tols[name]) for name in residuals}
    passed = all(verdicts.values())
    report = {
        "kind": kind,
        "seed": seed,
        "params": params,
        "tolerances": tols,
        "residuals": residuals,
        "verdicts": verdicts,
        "pass": passed,
        "details": details,
    }
    out_path = Path(args.out)
    _dump_json(report, out_path)
    if args.csv:
        rows = ["name,residual,tolerance,verdict"]
        for name in sorted(residuals):
            rows.append(f"{name},{residuals[name]!r},{tols[name]!r},{verdicts[name]}")
        Path(args.csv).write_text("\n".join(rows) + "\n", encoding="utf-8", newline="\n")
    for name in sorted(residuals):
        mark = "ok" if verdicts[name] else "FAIL"
        print(f"{name}: {residuals[name]:.6e} (tol {tols[name]:g}) {mark}")
    print("PASS" if passed else "FAIL")
    print(f"wall time: {time.perf_counter() - started:.3f} s", file=sys.stderr)
    return 0 if passed else 1


def _cmd_fixture(args) -> int:
    if args.kind not in FIXTURES:
        print(f"config error: unknown fixture kind {args.kind!r}; expected one of "
              f"{sorted(FIXTURES)}", file=sys.stderr)
        return 2
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = FIXTURES[args.kind](_rng(args.seed), out_dir)
    for path in paths:
        print(path)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="balayage-lab",
        description="Scenario runner for potential-theory verification checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run a scenario config and write a JSON report")
    p_run.add_argument("config", help="path to the scenario config JSON")
    p_run.add_argument("--out", default="report.json", help="report path (default report.json)")
    p_run.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_run.add_argument("--csv", default=None, help="also write the residual table as CSV")
    p_fix = sub.add_parser("fixture", help="write a deterministic fixture to a directory")
    p_fix.add_argument("kind", help="one of " + ", ".join(FIXTURE_KINDS))
    p_fix.add_argument("--seed", type=int, required=True)
    p_fix.add_argument("--out", required=True, help="output directory")
    args = parser.parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    return _cmd_fixture(args)


if __name__ == "__main__":
    sys.exit(main())

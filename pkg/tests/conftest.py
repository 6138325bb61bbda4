"""Shared builders for the test suite.

Everything here is deterministic: each helper takes an explicit rng or seed
so failures reproduce exactly.
"""

import numpy as np
import pytest

from balayage_lab import (
    BallDomain,
    CanonicalSubharmonic,
    DiscreteMeasure,
    dirac,
    full_box_grid,
    harmonic_measure_quadrature,
    sphere_points,
)


def random_positive_measure(rng, d, n_atoms, box_half=1.0):
    locs = rng.uniform(-box_half, box_half, (n_atoms, d))
    wts = rng.uniform(0.1, 2.0, n_atoms)
    return DiscreteMeasure.from_atoms(d, list(zip(locs, wts)))


def random_signed_measure(rng, d, n_atoms, box_half=1.0):
    locs = rng.uniform(-box_half, box_half, (n_atoms, d))
    wts = rng.uniform(-2.0, 2.0, n_atoms)
    wts[np.abs(wts) < 1e-3] = 0.5
    return DiscreteMeasure.from_atoms(d, list(zip(locs, wts)))


def make_subharmonic(rng, d, region, n_atoms=3, n_sources=3,
                     atom_radius=0.35, source_radius=6.0, atom_center=None):
    """Atoms inside a small ball, harmonic sources far outside the region."""
    if atom_center is None:
        atom_center = np.zeros(d)
    locs = 0.3 * rng.standard_normal((n_atoms, d))
    norms = np.maximum(1.0, np.linalg.norm(locs, axis=1) / atom_radius)
    locs = atom_center + locs / norms[:, None]
    atoms = DiscreteMeasure.from_atoms(
        d, list(zip(locs, rng.uniform(0.2, 1.0, n_atoms)))
    )
    dirs = rng.standard_normal((n_sources, d))
    dirs = dirs / np.linalg.norm(dirs, axis=1)[:, None]
    sources = DiscreteMeasure.from_atoms(
        d, list(zip(source_radius * dirs, rng.uniform(-1.0, 1.0, n_sources)))
    )
    return CanonicalSubharmonic(
        d, atoms, sources, float(rng.uniform(-1.0, 1.0)), region
    )


def swept_pair(rng, d=2, radius=0.7, n_quad=512, pole_scale=0.1):
    """A (dirac, harmonic-measure quadrature) pair known to be in balayage order."""
    center = rng.uniform(-0.02, 0.02, d)
    ball = BallDomain(d, center, radius)
    x = center + pole_scale * radius * rng.uniform(-1.0, 1.0, d)
    omega = harmonic_measure_quadrature(ball, x, n_quad)
    return dirac(x), omega, ball, x


def composed_sweep(rng, x, r1=0.45, r2=0.9, n1=64, n2=512):
    """Sweep delta_x onto the r1 circle, then every stage-one atom onto r2.

    Quadrature nodes depend only on (center, radius, n), so the stage-two
    atoms coincide across poles and merge down to n2 locations.
    """
    om1 = harmonic_measure_quadrature(BallDomain(2, np.zeros(2), r1), x, n1)
    B2 = BallDomain(2, np.zeros(2), r2)
    pairs = []
    for y, w in om1.atoms():
        sub = harmonic_measure_quadrature(B2, y, n2)
        pairs.extend((loc, w * wt) for loc, wt in sub.atoms())
    return DiscreteMeasure.from_atoms(2, pairs)


@pytest.fixture
def unit_disc():
    return BallDomain(2, np.zeros(2), 1.0)


@pytest.fixture
def small_grid():
    return full_box_grid([-1.4, -1.4], [1.4, 1.4], 40)

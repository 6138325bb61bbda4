"""Deterministic point families on circles and spheres.

Shared by spherical means, boundary quadratures, far-field probes, and the
walk-on-spheres sampler.  All families are closed-form functions of (n, d),
never of a random state.
"""

from __future__ import annotations

import numpy as np

__all__ = ["unit_directions", "sphere_points"]

_GOLDEN = (1.0 + np.sqrt(5.0)) / 2.0


def unit_directions(d: int, n: int) -> np.ndarray:
    """n unit vectors in R^d, shape (n, d).

    d == 1: alternating +1, -1.
    d == 2: uniform angles offset by half a step (no node on the x axis).
    d == 3: offset Fibonacci sphere points.
    """
    if n < 1:
        raise ValueError("need n >= 1 directions")
    if d == 1:
        signs = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
        return signs.reshape(n, 1)
    if d == 2:
        theta = 2.0 * np.pi * (np.arange(n) + 0.5) / n
        return np.column_stack([np.cos(theta), np.sin(theta)])
    if d == 3:
        i = np.arange(n)
        z = 1.0 - (2.0 * i + 1.0) / n
        rho = np.sqrt(np.maximum(0.0, 1.0 - z * z))
        phi = 2.0 * np.pi * i / _GOLDEN
        return np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])
    raise ValueError(f"unit_directions supports d in (1, 2, 3), got {d}")


def sphere_points(center, radius: float, n: int) -> np.ndarray:
    """n points on the sphere of given center and radius, shape (n, d)."""
    center = np.asarray(center, dtype=float)
    if radius <= 0.0:
        raise ValueError("radius must be positive")
    return center + radius * unit_directions(len(center), n)

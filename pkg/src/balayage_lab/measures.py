"""Finite signed atomic measures with exact atom bookkeeping."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

__all__ = ["Mass", "DiscreteMeasure", "dirac", "combine"]


@dataclass(frozen=True)
class Mass:
    total: float
    positive_total: float
    negative_total: float


def _canonical_atoms(d: int, atoms):
    # Merge coincident atoms by exact coordinate equality, drop exact zeros,
    # and order lexicographically so equal measures have equal storage.
    merged: dict[tuple, float] = {}
    for loc, w in atoms:
        loc = np.asarray(loc, dtype=float)
        if loc.shape != (d,):
            raise ValueError(f"atom location must have shape ({d},), got {loc.shape}")
        if not np.all(np.isfinite(loc)):
            raise ValueError("atom locations must be finite")
        w = float(w)
        if math.isnan(w) or math.isinf(w):
            raise ValueError("atom weights must be finite")
        key = tuple(float(c) for c in loc)
        new = merged.get(key, 0.0) + w
        if new == 0.0:
            merged.pop(key, None)
        else:
            merged[key] = new
    keys = sorted(merged)
    locations = np.array(keys, dtype=float).reshape(len(keys), d)
    weights = np.array([merged[k] for k in keys], dtype=float)
    locations.setflags(write=False)
    weights.setflags(write=False)
    return locations, weights


@dataclass(frozen=True)
class DiscreteMeasure:
    """Finite signed measure written as a sum of weighted point masses.

    Construct through from_atoms / dirac / combine.  Atoms at exactly equal
    coordinates are merged, zero weights dropped, and storage is ordered
    lexicographically by location, so the representation is canonical: no two
    distinct atom lists describe the same measure.
    """

    d: int
    locations: np.ndarray
    weights: np.ndarray

    @classmethod
    def from_atoms(cls, d: int, atoms) -> "DiscreteMeasure":
        if not isinstance(d, (int, np.integer)) or isinstance(d, bool) or d < 1:
            raise ValueError(f"dimension must be an integer >= 1, got {d!r}")
        locations, weights = _canonical_atoms(int(d), atoms)
        return cls(int(d), locations, weights)

    @classmethod
    def zero(cls, d: int) -> "DiscreteMeasure":
        return cls.from_atoms(d, [])

    @property
    def n_atoms(self) -> int:
        return len(self.weights)

    @property
    def is_zero(self) -> bool:
        return self.n_atoms == 0

    def mass(self) -> float:
        """Total mass by compensated summation."""
        return math.fsum(self.weights)

    def mass_split(self) -> Mass:
        pos = math.fsum(w for w in self.weights if w > 0.0)
        neg = math.fsum(-w for w in self.weights if w < 0.0)
        return Mass(total=self.mass(), positive_total=pos, negative_total=neg)

    def positive_part(self) -> "DiscreteMeasure":
        keep = self.weights > 0.0
        return DiscreteMeasure.from_atoms(
            self.d, zip(self.locations[keep], self.weights[keep])
        )

    def negative_part(self) -> "DiscreteMeasure":
        """The measure nu with self = positive_part - nu; nu has weights > 0."""
        keep = self.weights < 0.0
        return DiscreteMeasure.from_atoms(
            self.d, zip(self.locations[keep], -self.weights[keep])
        )

    def restrict(self, predicate) -> "DiscreteMeasure":
        """Keep atoms whose location satisfies predicate(location) -> bool."""
        kept = [
            (loc, w)
            for loc, w in zip(self.locations, self.weights)
            if bool(predicate(loc))
        ]
        return DiscreteMeasure.from_atoms(self.d, kept)

    def scaled(self, a: float) -> "DiscreteMeasure":
        return combine(a, self, 0.0, DiscreteMeasure.zero(self.d))

    def support_radius(self) -> float:
        """sup |location| over atoms (0 for the zero measure)."""
        if self.is_zero:
            return 0.0
        return float(np.max(np.linalg.norm(self.locations, axis=1)))

    def atoms(self):
        return list(zip(self.locations, self.weights))

    def to_json_dict(self) -> dict:
        return {
            "d": self.d,
            "atoms": [
                [[float(c) for c in loc], float(w)]
                for loc, w in zip(self.locations, self.weights)
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @classmethod
    def from_json_dict(cls, data: dict) -> "DiscreteMeasure":
        if not isinstance(data, dict) or "d" not in data or "atoms" not in data:
            raise ValueError("measure JSON needs keys 'd' and 'atoms'")
        return cls.from_atoms(data["d"], [(loc, w) for loc, w in data["atoms"]])

    @classmethod
    def from_json(cls, text: str) -> "DiscreteMeasure":
        return cls.from_json_dict(json.loads(text))

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiscreteMeasure):
            return NotImplemented
        return (
            self.d == other.d
            and self.locations.shape == other.locations.shape
            and bool(np.all(self.locations == other.locations))
            and bool(np.all(self.weights == other.weights))
        )


def dirac(x, weight: float = 1.0) -> DiscreteMeasure:
    """Unit point mass at x (dimension inferred from len(x))."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or len(x) < 1:
        raise ValueError("dirac location must be a 1d coordinate sequence")
    return DiscreteMeasure.from_atoms(len(x), [(x, weight)])


def combine(a: float, mu: DiscreteMeasure, b: float, nu: DiscreteMeasure) -> DiscreteMeasure:
    """The signed combination a * mu + b * nu with exact atom merging."""
    if mu.d != nu.d:
        raise ValueError("dimension mismatch in combine")
    a = float(a)
    b = float(b)
    atoms = [(loc, a * w) for loc, w in zip(mu.locations, mu.weights)]
    atoms += [(loc, b * w) for loc, w in zip(nu.locations, nu.weights)]
    return DiscreteMeasure.from_atoms(mu.d, atoms)

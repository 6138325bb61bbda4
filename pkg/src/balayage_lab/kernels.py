"""Radial and spatial kernels, dimension constants, extended-real arithmetic.

Conventions used across the package:

* Dimension ``d`` is an integer >= 1.
* The radial profile ``radial_kernel(s, t)`` is ``log t`` for ``s == 0`` and
  ``-sign(s) * t**(-s)`` otherwise.  It is strictly increasing in ``t`` for
  every exponent ``s``.
* The spatial kernel in dimension ``d`` is the radial profile with exponent
  ``d - 2`` applied to ``|y - x|``.  On the diagonal it is ``-inf`` for
  ``d >= 2`` and ``0.0`` for ``d == 1`` (where the profile extends
  continuously).
* Extended reals are plain floats together with ``math.inf`` of either sign.
  Adding opposite infinities is a hard error, never a silent NaN.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "InfinityConflictError",
    "ext_add",
    "ext_sum",
    "radial_kernel",
    "spatial_kernel",
    "riesz_constant",
]

#: Relative diagonal threshold: points closer than this times the coordinate
#: scale are treated as equal for kernel evaluation in d >= 2.
DIAGONAL_RTOL = 1e-14


class InfinityConflictError(ArithmeticError):
    """Raised when +inf and -inf meet in an extended-real sum."""


def ext_add(*terms: float) -> float:
    """Add extended reals, rejecting the indeterminate +inf + -inf."""
    return ext_sum(terms)


def ext_sum(terms) -> float:
    """Sum of extended reals with compensated accumulation of the finite part.

    Raises InfinityConflictError if both +inf and -inf occur, and ValueError
    on NaN input.
    """
    finite = []
    has_pos = False
    has_neg = False
    for t in terms:
        t = float(t)
        if math.isnan(t):
            raise ValueError("NaN is not an extended real")
        if t == math.inf:
            has_pos = True
        elif t == -math.inf:
            has_neg = True
        else:
            finite.append(t)
    if has_pos and has_neg:
        raise InfinityConflictError("sum mixes +inf and -inf")
    if has_pos:
        return math.inf
    if has_neg:
        return -math.inf
    return math.fsum(finite)


def _check_dimension(d: int) -> int:
    if not isinstance(d, (int, np.integer)) or isinstance(d, bool) or d < 1:
        raise ValueError(f"dimension must be an integer >= 1, got {d!r}")
    return int(d)


def radial_kernel(s: float, t) -> float:
    """Radial kernel profile k_s(t) for t > 0.

    k_0(t) = log t; otherwise k_s(t) = -sign(s) * t**(-s).  Strictly
    increasing in t, with k_s -> 0 at infinity for s > 0 and k_s -> -inf at 0
    for s >= 0.  Accepts scalars or arrays of positive t.
    """
    s = float(s)
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr <= 0.0):
        raise ValueError("radial_kernel requires t > 0")
    if s == 0.0:
        out = np.log(t_arr)
    else:
        out = -math.copysign(1.0, s) * t_arr ** (-s)
    if np.isscalar(t) or t_arr.ndim == 0:
        return float(out)
    return out


def spatial_kernel(d: int, y, x) -> float:
    """Kernel of dimension d between points y and x.

    Equals radial_kernel(d - 2, |y - x|) off the diagonal.  On the diagonal
    (|y - x| below DIAGONAL_RTOL times the coordinate scale) it is -inf for
    d >= 2 and 0.0 for d == 1.  Symmetric in its two arguments.
    """
    d = _check_dimension(d)
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    if y.shape != (d,) or x.shape != (d,):
        raise ValueError(f"points must have shape ({d},)")
    t = float(np.linalg.norm(y - x))
    scale = max(1.0, float(np.max(np.abs(y))), float(np.max(np.abs(x))))
    if t < DIAGONAL_RTOL * scale:
        return -math.inf if d >= 2 else 0.0
    return radial_kernel(d - 2, t)


def riesz_constant(d: int) -> float:
    """Normalization constant turning the Laplacian of the kernel into mass.

    gamma(d/2) / (2 * pi**(d/2) * max(1, d - 2)); evaluates to 1/2, 1/(2 pi),
    1/(4 pi) in dimensions 1, 2, 3.
    """
    d = _check_dimension(d)
    return math.gamma(d / 2.0) / (2.0 * math.pi ** (d / 2.0) * max(1, d - 2))

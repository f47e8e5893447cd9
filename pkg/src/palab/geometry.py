"""Metric substrate: points in the unit cube, powered distances, rectangles, angles.

Points are plain 1-d ``numpy`` float64 arrays; point sets are ``(n, d)`` arrays.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError

#: absolute tolerance used by solvers when comparing power totals
TOL = 1e-9
#: slack added to a node's power before testing whether it covers an edge
SLACK = 1e-12


@dataclass(frozen=True)
class Params:
    """Dimension ``d`` and distance-power gradient ``p``."""

    d: int
    p: float

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise InputError(f"d must be a positive integer, got {self.d!r}")
        if not (math.isfinite(self.p) and self.p > 0):
            raise InputError(f"p must be > 0, got {self.p!r}")
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "p", float(self.p))

    def require_p_at_least_one(self, what: str = "this operation"):
        if self.p < 1:
            raise InputError(f"{what} requires p >= 1, got p={self.p}")


@dataclass(frozen=True)
class HyperRect:
    """Axis-aligned box ``[lower, upper]``."""

    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lower)
        hi = tuple(float(v) for v in self.upper)
        if len(lo) != len(hi) or not lo:
            raise InputError("lower and upper must have the same positive length")
        if any(not a < b for a, b in zip(lo, hi)):
            raise InputError(f"degenerate rectangle {lo} .. {hi}")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def unit(cls, d: int) -> "HyperRect":
        return cls((0.0,) * d, (1.0,) * d)

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def diameter(self) -> float:
        return math.dist(self.lower, self.upper)

    def contains(self, x, tol: float = 0.0) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= np.asarray(self.lower) - tol) and np.all(x <= np.asarray(self.upper) + tol))

    def split(self, axis: int, cut: float) -> tuple["HyperRect", "HyperRect"]:
        """Bisect along ``axis`` at coordinate ``cut`` into (low side, high side)."""
        if not self.lower[axis] < cut < self.upper[axis]:
            raise InputError(f"cut {cut} not strictly inside axis {axis} of {self}")
        hi1 = list(self.upper)
        hi1[axis] = cut
        lo2 = list(self.lower)
        lo2[axis] = cut
        return HyperRect(self.lower, tuple(hi1)), HyperRect(tuple(lo2), self.upper)


def as_point(x, d: int | None = None) -> np.ndarray:
    a = np.atleast_1d(np.asarray(x, dtype=float))
    if a.ndim != 1:
        raise InputError(f"a point must be one-dimensional, got shape {a.shape}")
    if d is not None and a.shape[0] != d:
        raise InputError(f"expected a point of dimension {d}, got {a.shape[0]}")
    return a


def powered_dist(a, b, p: float) -> float:
    """Euclidean distance between ``a`` and ``b`` raised to the power ``p``."""
    a = as_point(a)
    b = as_point(b)
    if a.shape != b.shape:
        raise InputError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    if not p > 0:
        raise InputError(f"p must be > 0, got {p}")
    return float(np.linalg.norm(a - b)) ** p


def pairwise_powered(points: np.ndarray, p: float) -> np.ndarray:
    """Dense ``(n, n)`` matrix of powered distances."""
    diff = points[:, None, :] - points[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff)) ** p


def dist_to_boundary(x, r: HyperRect) -> float:
    """Smallest perpendicular distance from ``x`` to any face of ``r``."""
    x = as_point(x, r.dim)
    if not r.contains(x):
        raise InputError(f"point {x.tolist()} lies outside {r}")
    lo = np.asarray(r.lower)
    hi = np.asarray(r.upper)
    return float(min(np.min(x - lo), np.min(hi - x)))


def boundary_distances(points: np.ndarray, r: HyperRect) -> np.ndarray:
    """Vectorised :func:`dist_to_boundary` for an ``(n, d)`` array."""
    if points.shape[1] != r.dim:
        raise InputError(f"points have dimension {points.shape[1]}, rectangle {r.dim}")
    lo = np.asarray(r.lower)
    hi = np.asarray(r.upper)
    if np.any(points < lo) or np.any(points > hi):
        raise InputError("some points lie outside the rectangle")
    return np.minimum((points - lo).min(axis=1), (hi - points).min(axis=1))


def angle_at(x, v, y) -> float:
    """Angle between the rays v->x and v->y, in [0, pi]."""
    x, v, y = as_point(x), as_point(v), as_point(y)
    if not (x.shape == v.shape == y.shape):
        raise InputError("dimension mismatch")
    a = x - v
    b = y - v
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise InputError("angle undefined when x or y coincides with the apex")
    c = float(np.dot(a, b) / (na * nb))
    return math.acos(min(1.0, max(-1.0, c)))

"""One-dimensional cases in closed form: interval-valued maps on the line,
plus the adapter that gates segment-valued planar instances.

The interval refinement needs no clipping or LP, so it doubles as an exact
anchor for cross-validating the planar engine (embed intervals as horizontal
segments under the max norm and the two routes must agree).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GeometryError, MalformedInputError
from .geometry import ConvexBody, PolygonalNorm, point_body
from .refine import SetValuedMap

INTERVAL_RTOL = 1e-12


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not (np.isfinite(self.lo) and np.isfinite(self.hi) and self.lo <= self.hi):
            raise GeometryError(f"bad interval [{self.lo}, {self.hi}]")


def _arrays(intervals):
    los = np.array([iv.lo for iv in intervals], dtype=float)
    his = np.array([iv.hi for iv in intervals], dtype=float)
    return los, his


def interval_refinement(intervals, space, lam):
    """Refinement of an interval-valued map: at x the result is
    [max_z (lo_z - lam rho(x,z)), min_z (hi_z + lam rho(x,z))], or None when
    the endpoints cross. Terms at infinite distance drop out automatically.
    """
    if not (np.isfinite(lam) and lam >= 0):
        raise MalformedInputError("refinement rate must be finite and nonnegative")
    if len(intervals) != space.n:
        raise MalformedInputError("need one interval per point")
    los, his = _arrays(intervals)
    R = lam * space.d
    R[~np.isfinite(space.d)] = np.inf
    lo1 = np.nanmax(np.where(np.isfinite(R), los[None, :] - R, -np.inf), axis=1)
    hi1 = np.nanmin(np.where(np.isfinite(R), his[None, :] + R, np.inf), axis=1)
    return [Interval(a, b) if a <= b else None for a, b in zip(lo1, hi1)]


def interval_hausdorff(a, b):
    """1D Hausdorff distance max(|lo gap|, |hi gap|)."""
    return max(abs(a.lo - b.lo), abs(a.hi - b.hi))


def interval_core_check(intervals, space, gamma):
    """All-pairs 1D Hausdorff ratio check at constant gamma (exact arithmetic,
    relative tolerance 1e-12 only)."""
    if any(iv is None for iv in intervals):
        return False, float("inf")
    d = space.d
    scale = max(1.0, max(abs(iv.lo) for iv in intervals), max(abs(iv.hi) for iv in intervals))
    worst = 0.0
    for i in range(space.n):
        for j in range(i + 1, space.n):
            rho = d[i, j]
            if not np.isfinite(rho):
                continue
            h = interval_hausdorff(intervals[i], intervals[j])
            if rho == 0.0:
                if h > INTERVAL_RTOL * scale:
                    return False, float("inf")
                continue
            worst = max(worst, h / rho)
    return worst <= gamma * (1.0 + INTERVAL_RTOL) + INTERVAL_RTOL * scale, worst


def interval_pair_feasible(a, b, rho, bound):
    """Closed-form two-point selection test: values g_a in a, g_b in b with
    |g_a - g_b| <= bound * rho exist iff the gap between intervals is small."""
    if not np.isfinite(rho):
        return True
    gap = max(a.lo - b.hi, b.lo - a.hi, 0.0)
    return gap <= bound * rho * (1.0 + INTERVAL_RTOL) + INTERVAL_RTOL


def segment_instance_adapter(F):
    """Gate for the segment-valued (dimension <= 1) constant set: returns the
    map unchanged, or raises naming the first point carrying a 2D body."""
    if not isinstance(F, SetValuedMap):
        raise MalformedInputError("adapter expects a set-valued map")
    for i, b in enumerate(F.bodies):
        if b is not None and b.dim > 1:
            raise MalformedInputError(
                f"body at point {F.space.labels[i]!r} has dimension 2; "
                "segment constants require dimension <= 1")
    return F


def embed_intervals(intervals, space, norm=None):
    """Intervals as horizontal segments on the x-axis (max-norm plane by
    default); used to cross-validate the planar engine against closed form."""
    norm = norm or PolygonalNorm.linf()
    bodies = []
    for iv in intervals:
        if iv.hi > iv.lo:
            bodies.append(ConvexBody([[iv.lo, 0.0], [iv.hi, 0.0]]))
        else:
            bodies.append(point_body([iv.lo, 0.0]))
    return SetValuedMap(space, norm, bodies)


def extract_intervals(F, tol=1e-7):
    """Inverse of embed_intervals: x-ranges of bodies that must lie within
    tol of the x-axis."""
    out = []
    for b in F.bodies:
        if b is None:
            out.append(None)
            continue
        if np.abs(b.vertices[:, 1]).max() > tol:
            raise GeometryError("body strays from the x-axis")
        out.append(Interval(float(b.vertices[:, 0].min()), float(b.vertices[:, 0].max())))
    return out

"""Point-valued selections extracted from refined maps."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CertificationError
from .geometry import steiner_point
from .tolerances import EPS_CHECK


@dataclass(frozen=True)
class Selection:
    """One point per space point, plus the measured Lipschitz seminorm."""

    points: np.ndarray
    seminorm: float

    def as_dict(self, space):
        return {lab: [float(p[0]), float(p[1])] for lab, p in zip(space.labels, self.points)}


def steiner_selection(F2):
    """Steiner point of each body of F2; fails when any body is empty.

    Because refinements only shrink bodies, the selection lands inside every
    earlier iterate of the chain that produced F2, so it is a selection of
    the original map as well.
    """
    for i, b in enumerate(F2.bodies):
        if b is None:
            raise CertificationError(
                f"map is empty at point {F2.space.labels[i]!r}", label=F2.space.labels[i])
    pts = np.array([steiner_point(b) for b in F2.bodies])
    return Selection(points=pts, seminorm=lipschitz_seminorm(pts, F2.space, F2.norm))


def lipschitz_seminorm(points, space, norm):
    """Largest gauge(f(x)-f(y)) / rho(x,y) over pairs at finite distance.

    Pairs at distance zero with distinct values force +inf; pairs at +inf
    impose no constraint.
    """
    pts = np.asarray(points, dtype=float)
    d = space.d
    scale = max(1.0, float(np.abs(pts).max()))
    worst = 0.0
    for i in range(space.n):
        for j in range(i + 1, space.n):
            rho = d[i, j]
            if not np.isfinite(rho):
                continue
            gap = norm.gauge(pts[i] - pts[j])
            if rho == 0.0:
                if gap > EPS_CHECK * scale:
                    return float("inf")
                continue
            worst = max(worst, gap / rho)
    return worst

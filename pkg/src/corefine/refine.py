"""Balanced refinements of set-valued maps and their iterates.

The refinement of F at x under rate lam intersects, over all points z at
finite distance, the bodies F(z) inflated by lam * rho(x, z) unit balls.
Iterating twice with a schedule (lambda1, lambda2) produces the candidate
core F2; refining once more at the core constant gamma tests stabilization
(F3 == F2).

The per-point work never builds inflated polygons explicitly: an inflated
body K + r*ball is exactly {x : N x <= o_K(N) + r h_ball(N)} over the facet
normals N of K and of the ball, so each term contributes a cheap halfplane
system assembled from precomputed support values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GeometryError, MalformedInputError
from .geometry import (
    ConvexBody,
    _clip_system,
    _feasible_point,
    canonical_loop,
    hausdorff,
    intersect,
    minkowski_add_ball,
    point_body,
    separation,
)
from .metricspace import PseudometricSpace
from .tolerances import EPS_CHECK, EPS_GEOM


@dataclass(frozen=True)
class RefinementSchedule:
    """Refinement rates (lambda_1, lambda_2, ...) plus the core constant gamma."""

    lambdas: tuple
    gamma: float

    def __post_init__(self):
        lams = tuple(float(v) for v in self.lambdas)
        object.__setattr__(self, "lambdas", lams)
        if not lams or any(not np.isfinite(v) or v < 1 for v in lams):
            raise MalformedInputError("refinement rates must be finite and >= 1")
        if not (np.isfinite(self.gamma) and self.gamma > 0):
            raise MalformedInputError("gamma must be positive and finite")

    @property
    def L(self):
        if len(self.lambdas) < 2:
            return None
        return self.lambdas[1] / self.lambdas[0]

    def core_constraints_ok(self):
        """Whether the schedule satisfies the rate constraints a two-step
        core certificate relies on (second rate at least three times the first)."""
        return len(self.lambdas) >= 2 and self.lambdas[1] >= 3 * self.lambdas[0] - EPS_CHECK


class SetValuedMap:
    """Assignment of one body (or None once refinements empty out) per point."""

    __slots__ = ("space", "norm", "bodies")

    def __init__(self, space, norm, bodies):
        if len(bodies) != space.n:
            raise MalformedInputError("need exactly one body per point")
        self.space = space
        self.norm = norm
        self.bodies = list(bodies)

    def body(self, label):
        return self.bodies[self.space.index(label)]

    def nonempty_everywhere(self):
        return all(b is not None for b in self.bodies)

    def empty_points(self):
        return [i for i, b in enumerate(self.bodies) if b is None]

    def max_dim(self):
        return max(b.dim for b in self.bodies if b is not None)

    def coordinate_scale(self):
        s = 1.0
        for b in self.bodies:
            if b is not None:
                s = max(s, b.scale)
        return s

    def __repr__(self):
        empty = len(self.empty_points())
        return f"SetValuedMap(n={self.space.n}, empty={empty})"


def _term_systems(F):
    """Per-point precomputation for inflated-term halfplane systems."""
    Nb, ob = F.norm.ball.halfplanes()
    pre = []
    for body in F.bodies:
        if body is None:
            pre.append(None)
            continue
        Nz, oz = body.halfplanes()
        sz_at_ball = body.supports(Nb)
        ball_at_nz = F.norm.ball_support(Nz)
        pre.append((Nz, oz, sz_at_ball, ball_at_nz, body.size_measure()))
    return (Nb, ob), pre


def balanced_refinement(F, lam):
    """One balanced-refinement step: result(x) = the intersection over z of
    F(z) + lam * rho(x, z) * ball, skipping z at infinite distance.

    Points where the intersection is empty get None; refining a map that
    already has None values keeps them None (and empties every point at
    finite distance from one, since an empty term empties the intersection).
    """
    if not (np.isfinite(lam) and lam >= 0):
        raise GeometryError("refinement rate must be finite and nonnegative")
    d = F.space.d
    n = F.space.n
    (Nb, ob), pre = _term_systems(F)
    finite_d = d[np.isfinite(d)]
    radius_cap = lam * float(finite_d.max(initial=0.0))
    scale = F.coordinate_scale() + radius_cap * F.norm.ball.scale
    tol = EPS_GEOM * scale
    out = []
    for x in range(n):
        if F.bodies[x] is None:
            out.append(None)
            continue
        dx = d[x]
        ball_size = F.norm.ball.size_measure()

        def term_size(z):
            if pre[z] is None:
                return -1.0  # empty terms decide immediately, take them first
            return lam * dx[z] * ball_size + pre[z][4]

        candidates = [z for z in range(n)
                      if np.isfinite(dx[z]) and not (z == x and dx[z] == 0.0)]
        order = sorted(candidates, key=term_size)
        W = F.bodies[x].vertices
        hit_empty_term = False
        for z in order:
            if pre[z] is None:
                hit_empty_term = True
                break
            Nz, oz, sz_at_ball, ball_at_nz, _ = pre[z]
            r = lam * dx[z]
            N = np.vstack([Nz, Nb])
            o = np.concatenate([oz + r * ball_at_nz, sz_at_ball + r * ob])
            W = _clip_system(W, N, o, tol)
            if not len(W):
                break
        if hit_empty_term:
            out.append(None)
            continue
        if len(W):
            out.append(ConvexBody(canonical_loop(W, tol), canonical=True))
            continue
        # clipping collapsed: settle emptiness by pooled-system feasibility
        rows_N = [F.bodies[x].halfplanes()[0]]
        rows_o = [F.bodies[x].halfplanes()[1]]
        for z in order:
            Nz, oz, sz_at_ball, ball_at_nz, _ = pre[z]
            r = lam * dx[z]
            rows_N += [Nz, Nb]
            rows_o += [oz + r * ball_at_nz, sz_at_ball + r * ob]
        p, _ = _feasible_point(np.vstack(rows_N), np.concatenate(rows_o), scale)
        out.append(None if p is None else point_body(p))
    return SetValuedMap(F.space, F.norm, out)


def iterate(F, schedule, k):
    """Chain of refinements [F, F1, ..., Fk] using the first k schedule rates."""
    if k > len(schedule.lambdas):
        raise MalformedInputError("requested more iterates than schedule rates")
    chain = [F]
    for j in range(k):
        chain.append(balanced_refinement(chain[-1], schedule.lambdas[j]))
    return chain


def orbit_set(F, delta, L, x, u, u1, u2):
    """Tree-orbit body [(F(u1)+delta(u1,u)B) cap (F(u2)+delta(u2,u)B)] +
    L*delta(u,x)B. All three radii must be finite; None when the inner
    intersection is empty."""
    d = delta.d if isinstance(delta, PseudometricSpace) else np.asarray(delta, dtype=float)
    r1, r2, rx = d[u1, u], d[u2, u], L * d[u, x]
    if not (np.isfinite(r1) and np.isfinite(r2) and np.isfinite(rx)):
        raise GeometryError("orbit set undefined for infinite distances")
    A = minkowski_add_ball(F.bodies[u1], r1, F.norm)
    B = minkowski_add_ball(F.bodies[u2], r2, F.norm)
    inner = intersect([A, B])
    if inner is None:
        return None
    return minkowski_add_ball(inner, rx, F.norm)


def segment_orbit_set(F, delta, L, x, u, u1):
    """Two-leg orbit body [(F(u1)+delta(u1,u)B) cap F(u)] + L*delta(u,x)B."""
    d = delta.d if isinstance(delta, PseudometricSpace) else np.asarray(delta, dtype=float)
    r1, rx = d[u1, u], L * d[u, x]
    if not (np.isfinite(r1) and np.isfinite(rx)):
        raise GeometryError("orbit set undefined for infinite distances")
    A = minkowski_add_ball(F.bodies[u1], r1, F.norm)
    inner = intersect([A, F.bodies[u]])
    if inner is None:
        return None
    return minkowski_add_ball(inner, rx, F.norm)


def stabilization_check(F2, gamma, tol=None):
    """Refine F2 once more at rate gamma and compare: passes when the extra
    step changes nothing (maximum Hausdorff gap within tolerance)."""
    if not F2.nonempty_everywhere():
        raise MalformedInputError("stabilization check needs a nonempty map")
    if tol is None:
        tol = EPS_CHECK * max(1.0, F2.coordinate_scale())
    F3 = balanced_refinement(F2, gamma)
    defect = 0.0
    for b2, b3 in zip(F2.bodies, F3.bodies):
        if b3 is None:
            return False, np.inf
        defect = max(defect, hausdorff(b2, b3, F2.norm))
    return defect <= tol, defect


def find_empty_witness(F, lam, x, max_terms=24):
    """Small certificate for an empty refinement at x: indices z whose
    inflated terms already have empty intersection (at most 3 by Helly).

    Falls back to the full index list when the bounded search fails.
    """
    d = F.space.d[x]
    terms = []
    idx = []
    for z in range(F.space.n):
        if not np.isfinite(d[z]):
            continue
        if F.bodies[z] is None:
            return [z]
        terms.append(minkowski_add_ball(F.bodies[z], lam * d[z], F.norm))
        idx.append(z)
    order = sorted(range(len(terms)), key=lambda i: terms[i].size_measure())[:max_terms]
    tol = EPS_GEOM * max(1.0, max(t.scale for t in terms))
    for a in range(len(order)):
        for b in range(a + 1, len(order)):
            i, j = order[a], order[b]
            if separation(terms[i], terms[j], F.norm) > tol:
                return sorted([idx[i], idx[j]])
    for a in range(len(order)):
        for b in range(a + 1, len(order)):
            for c in range(b + 1, len(order)):
                i, j, k = order[a], order[b], order[c]
                if intersect([terms[i], terms[j], terms[k]]) is None:
                    return sorted([idx[i], idx[j], idx[k]])
    return sorted(idx)

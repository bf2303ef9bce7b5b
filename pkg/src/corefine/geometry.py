"""2D convex-body kernel under polygonal norms.

Bodies are nonempty compact convex subsets of the plane of dimension 0, 1 or
2, stored as canonical CCW vertex lists. Every operation here is closed over
that representation: Minkowski sums with scaled unit balls, intersections
(halfplane clipping, with an LP feasibility fallback near emptiness),
containment, Hausdorff distance under an arbitrary polygonal norm, support
functions, the classical planar Steiner point, and axis-aligned rectangular
hulls.

All functions are pure; bodies and norms are immutable after construction.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import linprog

from .errors import GeometryError, IndeterminateError
from .tolerances import EPS_GEOM, EPS_TIGHT

_AXES4 = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])


def _as_points(points):
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(1, -1)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] == 0:
        raise GeometryError(f"expected a nonempty (k, 2) vertex array, got shape {pts.shape}")
    if not np.isfinite(pts).all():
        raise GeometryError("vertex coordinates must be finite")
    return pts


def _dedup(pts, tol):
    """Greedy removal of points within tol of an already kept point."""
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    kept = []
    for i in order:
        p = pts[i]
        if all((abs(p[0] - q[0]) > tol or abs(p[1] - q[1]) > tol)
               or math.hypot(p[0] - q[0], p[1] - q[1]) > tol for q in kept):
            kept.append(p)
    return np.array(kept)


def canonical_loop(W, tol):
    """Canonicalize a convex CCW vertex loop: drop duplicate runs and
    within-tolerance collinear vertices (judged against the chord of the
    loop neighbours, which is scale-correct), keep CCW order, start at the
    lexicographic minimum. Collapses to 2 or 1 vertices when flat."""
    if len(W) > 1:
        gaps = np.hypot(*(W - np.roll(W, 1, axis=0)).T)
        keep = gaps > tol
        if not keep.any():
            return W[:1]
        W = W[keep]
    if len(W) > 2:
        for _ in range(4):
            prev = np.roll(W, 1, axis=0)
            nxt = np.roll(W, -1, axis=0)
            e1 = W - prev
            e2 = nxt - W
            cross = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
            chord = np.hypot(*(nxt - prev).T)
            keep = cross > tol * chord
            if keep.all():
                break
            if keep.sum() < 3:
                order = np.lexsort((W[:, 1], W[:, 0]))
                ends = W[[order[0], order[-1]]]
                if np.hypot(*(ends[1] - ends[0])) <= tol:
                    return ends[:1]
                return ends
            W = W[keep]
    if len(W) > 2:
        start = np.lexsort((W[:, 1], W[:, 0]))[0]
        W = np.roll(W, -start, axis=0)
    elif len(W) == 2:
        W = W[np.lexsort((W[:, 1], W[:, 0]))]
    return W


def _hull_exact(pts):
    """Andrew monotone chain with exact sign tests; CCW output. All extreme
    points survive, including near-collinear ones (collapsed later)."""
    pts = pts[np.lexsort((pts[:, 1], pts[:, 0]))]

    def build(seq):
        chain = []
        for p in seq:
            while len(chain) >= 2:
                o, a = chain[-2], chain[-1]
                if (a[0] - o[0]) * (p[1] - o[1]) - (a[1] - o[1]) * (p[0] - o[0]) <= 0:
                    chain.pop()
                else:
                    break
            chain.append(p)
        return chain

    lower = build(pts)
    upper = build(pts[::-1])
    hull = np.array(lower[:-1] + upper[:-1])
    if len(hull) < 3:
        return pts[np.array([0, -1])] if len(pts) > 1 else pts
    area2 = (hull[:, 0] * np.roll(hull[:, 1], -1) - hull[:, 1] * np.roll(hull[:, 0], -1)).sum()
    return hull if area2 > 0 else hull[::-1]


def canonical_vertices(points, tol=None):
    """Canonical CCW vertex list: dedup, exact convex hull, then collinear
    collapse at tolerance on the resulting loop.

    Degenerate inputs are legal: output may hold 1 vertex (a point) or
    2 vertices (a segment). The first vertex is the lexicographic minimum so
    equal bodies serialize identically.
    """
    pts = _as_points(points)
    scale = max(1.0, float(np.abs(pts).max()))
    if tol is None:
        tol = EPS_GEOM * scale
    pts = _dedup(pts, tol)
    if len(pts) <= 2:
        return pts
    return canonical_loop(_hull_exact(pts), tol)


class ConvexBody:
    """Nonempty compact convex subset of the plane, dimension 0, 1 or 2."""

    __slots__ = ("vertices", "_hp")

    def __init__(self, vertices, canonical=False):
        self.vertices = _as_points(vertices).copy() if canonical else canonical_vertices(vertices)
        self.vertices.setflags(write=False)
        self._hp = None

    @property
    def dim(self):
        return min(len(self.vertices) - 1, 2)

    @property
    def scale(self):
        return max(1.0, float(np.abs(self.vertices).max()))

    def support(self, u):
        """Support function h(u) = max over the body of <., u>."""
        u = np.asarray(u, dtype=float)
        if not np.isfinite(u).all() or (u == 0).all():
            raise GeometryError("support direction must be finite and nonzero")
        return float((self.vertices @ u).max())

    def supports(self, U):
        """Support values for a (m, 2) batch of directions."""
        return (self.vertices @ np.asarray(U, dtype=float).T).max(axis=0)

    def halfplanes(self):
        """Unit outward normals N and offsets o with body = {x : N x <= o}.

        Degenerate bodies get an exact 4-halfplane system (axis box for a
        point, slab plus end caps for a segment).
        """
        if self._hp is None:
            V = self.vertices
            if len(V) == 1:
                N = _AXES4
                o = N @ V[0]
            elif len(V) == 2:
                u = V[1] - V[0]
                u = u / np.hypot(u[0], u[1])
                n = np.array([-u[1], u[0]])
                N = np.array([n, -n, u, -u])
                o = np.array([n @ V[0], -(n @ V[0]), u @ V[1], -(u @ V[0])])
            else:
                E = np.roll(V, -1, axis=0) - V
                lens = np.hypot(E[:, 0], E[:, 1])
                N = np.column_stack([E[:, 1], -E[:, 0]]) / lens[:, None]
                o = (N * V).sum(axis=1)
            self._hp = (N, o)
        return self._hp

    def edge_normals(self):
        """Directions where the support function is non-smooth (unit vectors)."""
        V = self.vertices
        if len(V) == 1:
            return np.empty((0, 2))
        if len(V) == 2:
            u = V[1] - V[0]
            u = u / np.hypot(u[0], u[1])
            n = np.array([-u[1], u[0]])
            return np.array([n, -n])
        return self.halfplanes()[0]

    def translate(self, v):
        out = ConvexBody.__new__(ConvexBody)
        verts = self.vertices + np.asarray(v, dtype=float)
        verts.setflags(write=False)
        out.vertices = verts
        out._hp = None
        return out

    def bounding_box(self):
        lo = self.vertices.min(axis=0)
        hi = self.vertices.max(axis=0)
        return lo, hi

    def size_measure(self):
        """Cheap monotone size proxy (bounding-box half perimeter)."""
        lo, hi = self.bounding_box()
        return float((hi - lo).sum())

    def same_as(self, other, slack=1.0):
        return contains(self, other, slack) and contains(other, self, slack)

    def __repr__(self):
        return f"ConvexBody(dim={self.dim}, vertices={self.vertices.tolist()})"


def point_body(p):
    return ConvexBody(np.asarray(p, dtype=float).reshape(1, 2), canonical=True)


def box_body(xlo, xhi, ylo, yhi):
    return ConvexBody([[xlo, ylo], [xhi, ylo], [xhi, yhi], [xlo, yhi]])


class PolygonalNorm:
    """A norm on R^2 whose unit ball is a centrally symmetric convex polygon."""

    __slots__ = ("kind", "ngon", "ball", "_rows", "_bn", "_bo")

    def __init__(self, ball, kind="polygon", ngon=None):
        if ball.dim != 2:
            raise GeometryError("unit ball must be two dimensional")
        V = ball.vertices
        scale = ball.scale
        N, o = ball.halfplanes()
        if (o <= EPS_GEOM * scale).any():
            raise GeometryError("unit ball must contain the origin strictly inside")
        for v in V:
            if np.hypot(*(V + v).T).min() > EPS_GEOM * scale * 10:
                raise GeometryError("unit ball must be centrally symmetric")
        self.kind = kind
        self.ngon = ngon
        self.ball = ball
        self._bn, self._bo = N, o
        self._rows = N / o[:, None]

    @property
    def ball_vertices(self):
        return self.ball.vertices

    def gauge(self, v):
        """Minkowski functional of the ball: gauge(v) = min{t >= 0 : v in t ball}."""
        g = float((self._rows @ np.asarray(v, dtype=float)).max())
        return max(g, 0.0)

    def gauge_many(self, V):
        g = (np.asarray(V, dtype=float) @ self._rows.T).max(axis=1)
        return np.maximum(g, 0.0)

    def ball_support(self, U):
        return (self.ball.vertices @ np.asarray(U, dtype=float).T).max(axis=0)

    def ball_edge_normals(self):
        return self.ball.edge_normals()

    def distortion(self):
        """Worst-case ratio to the Euclidean norm for the 'euclidean' kind."""
        if self.kind == "euclidean" and self.ngon:
            return 1.0 / math.cos(math.pi / self.ngon)
        return 1.0

    @classmethod
    def linf(cls):
        return cls(box_body(-1, 1, -1, 1), kind="linf")

    @classmethod
    def l1(cls):
        return cls(ConvexBody([[1, 0], [0, 1], [-1, 0], [0, -1]]), kind="l1")

    @classmethod
    def euclidean(cls, ngon=64):
        if ngon < 8 or ngon % 2:
            raise GeometryError("euclidean surrogate needs an even ngon >= 8")
        th = 2 * math.pi * np.arange(ngon) / ngon
        return cls(ConvexBody(np.column_stack([np.cos(th), np.sin(th)])),
                   kind="euclidean", ngon=ngon)

    @classmethod
    def from_vertices(cls, vertices):
        return cls(ConvexBody(vertices), kind="polygon")

    def to_config(self):
        if self.kind == "polygon":
            return {"kind": "polygon", "vertices": self.ball.vertices.tolist()}
        cfg = {"kind": self.kind}
        if self.kind == "euclidean":
            cfg["ngon"] = self.ngon
        return cfg

    @classmethod
    def from_config(cls, cfg):
        kind = cfg.get("kind", "polygon")
        if kind == "linf":
            return cls.linf()
        if kind == "l1":
            return cls.l1()
        if kind == "euclidean":
            return cls.euclidean(int(cfg.get("ngon", 64)))
        if kind == "polygon":
            return cls.from_vertices(cfg["vertices"])
        raise GeometryError(f"unknown norm kind {kind!r}")

    def __repr__(self):
        return f"PolygonalNorm(kind={self.kind!r}, vertices={len(self.ball.vertices)})"


# ---------------------------------------------------------------------------
# clipping kernel


def _clip_one(P, d, tol):
    """One Sutherland-Hodgman pass: keep {x : signed distance d <= tol}."""
    k = len(P)
    inside = d <= tol
    if inside.all():
        return P
    if not inside.any():
        return P[:0]
    nxt = np.arange(1, k + 1)
    nxt[-1] = 0
    d2 = d[nxt]
    crossing = inside != inside[nxt]
    t = np.zeros(k)
    denom = d - d2
    np.divide(d, denom, out=t, where=crossing)
    # near-parallel edges can push t outside the segment; any point of the
    # segment is then within tolerance of the cut line, so clamp
    np.clip(t, 0.0, 1.0, out=t)
    X = P + t[:, None] * (P[nxt] - P)
    pool = np.stack([P, X], axis=1).reshape(2 * k, 2)
    keep = np.stack([inside, crossing], axis=1).reshape(2 * k)
    return pool[keep]


def _clip_system(W, N, o, tol):
    """Clip vertex loop W against halfplane system {x : N x <= o}."""
    while len(W):
        D = W @ N.T - o
        worst = int(np.argmax(D.max(axis=0)))
        if D[:, worst].max() <= tol:
            return W
        W = _clip_one(W, D[:, worst], tol)
    return W


def _feasible_point(N, o, scale):
    """Max-slack LP for {x : N x <= o}; returns (point, slack) or (None, slack)."""
    A = np.column_stack([N, np.ones(len(N))])
    for shift in (0.0, EPS_GEOM * scale):
        res = linprog(c=[0.0, 0.0, -1.0], A_ub=A, b_ub=o + shift,
                      bounds=[(None, None)] * 3, method="highs")
        if res.status == 0:
            slack = float(res.x[2]) - shift
            if slack >= -EPS_GEOM * scale:
                return res.x[:2], slack
            return None, slack
        if res.status == 2:
            return None, -np.inf
    raise IndeterminateError("halfplane feasibility LP failed")


# ---------------------------------------------------------------------------
# operations


def minkowski_sum(A, B):
    """Minkowski sum of two bodies (vertex arrays or ConvexBody)."""
    P = A.vertices if isinstance(A, ConvexBody) else _as_points(A)
    Q = B.vertices if isinstance(B, ConvexBody) else _as_points(B)
    if len(P) < 3 or len(Q) < 3:
        sums = (P[:, None, :] + Q[None, :, :]).reshape(-1, 2)
        return ConvexBody(sums)

    def rolled(V):
        i = np.lexsort((V[:, 0], V[:, 1]))[0]
        V = np.roll(V, -i, axis=0)
        E = np.roll(V, -1, axis=0) - V
        ang = np.mod(np.arctan2(E[:, 1], E[:, 0]), 2 * math.pi)
        return V[0], E, ang

    p0, EP, aP = rolled(P)
    q0, EQ, aQ = rolled(Q)
    E = np.vstack([EP, EQ])
    order = np.argsort(np.concatenate([aP, aQ]), kind="stable")
    verts = (p0 + q0) + np.vstack([[0.0, 0.0], np.cumsum(E[order], axis=0)[:-1]])
    return ConvexBody(verts)


def minkowski_add_ball(K, r, norm):
    """K + r * (unit ball of norm). r = 0 returns K unchanged."""
    if not np.isfinite(r) or r < 0:
        raise GeometryError("inflation radius must be finite and nonnegative")
    if r == 0:
        return K
    return minkowski_sum(K.vertices, norm.ball_vertices * r)


def intersect(bodies, tol=None):
    """Intersection of a nonempty list of bodies; None when empty.

    Runs incremental halfplane clipping starting from the smallest body.
    When clipping collapses the working set, emptiness is decided by a
    max-slack feasibility LP over the pooled halfplane system rather than by
    the clipping degeneracy itself.
    """
    if not bodies:
        raise GeometryError("intersect needs at least one body")
    if len(bodies) == 1:
        return bodies[0]
    order = sorted(range(len(bodies)), key=lambda i: bodies[i].size_measure())
    scale = max(b.scale for b in bodies)
    if tol is None:
        tol = EPS_GEOM * scale
    W = bodies[order[0]].vertices
    for i in order[1:]:
        N, o = bodies[i].halfplanes()
        W = _clip_system(W, N, o, tol)
        if not len(W):
            break
    if len(W):
        return ConvexBody(W)
    systems = [bodies[i].halfplanes() for i in order]
    N = np.vstack([s[0] for s in systems])
    o = np.concatenate([s[1] for s in systems])
    p, _ = _feasible_point(N, o, scale)
    if p is None:
        return None
    return point_body(p)


def contains(outer, inner, slack=1.0):
    """True iff inner lies in outer inflated by a slack * EPS_GEOM margin."""
    if slack < 0:
        raise GeometryError("slack must be nonnegative")
    N, o = outer.halfplanes()
    s = max(outer.scale, inner.scale)
    margin = slack * EPS_GEOM * s + EPS_TIGHT * s
    return float((inner.vertices @ N.T - o).max()) <= margin


def _event_directions(A, B, norm):
    return np.vstack([A.edge_normals(), B.edge_normals(), norm.ball_edge_normals()])


def hausdorff(A, B, norm):
    """Hausdorff distance in the given norm.

    For polygonal bodies and a polygonal ball the distance equals the maximum
    of |h_A(u) - h_B(u)| / h_ball(u) over the directions where any of the
    three support functions is non-smooth, which this evaluates exactly.
    """
    U = _event_directions(A, B, norm)
    hA = A.supports(U)
    hB = B.supports(U)
    hb = norm.ball_support(U)
    return float((np.abs(hA - hB) / hb).max())


def directed_gap(A, B, norm):
    """Smallest r >= 0 with A inside B + r * ball (directed Hausdorff gap)."""
    U = _event_directions(A, B, norm)
    g = ((A.supports(U) - B.supports(U)) / norm.ball_support(U)).max()
    return max(float(g), 0.0)


def gauge_distance(p, K, norm):
    """Distance from a point to a body measured by the norm's gauge."""
    return directed_gap(point_body(p), K, norm)


def separation(A, B, norm):
    """Smallest r >= 0 with A meeting B + r * ball (0 iff they intersect)."""
    U = _event_directions(A, B, norm)
    U = np.vstack([U, -U])
    g = (-(A.supports(-U) + B.supports(U)) / norm.ball_support(U)).max()
    return max(float(g), 0.0)


def steiner_point(K):
    """Classical planar Steiner point: normalized first moment of the support
    function over directions, evaluated in closed form per normal-cone arc."""
    V = K.vertices
    if len(V) == 1:
        return V[0].copy()
    if len(V) == 2:
        return V.mean(axis=0)
    E = np.roll(V, -1, axis=0) - V
    phi = np.arctan2(-E[:, 0], E[:, 1])  # outward normal angles, CCW order
    width = np.mod(np.roll(phi, -1) - phi, 2 * math.pi)
    a = phi
    b = phi + width
    # vertex following edge i owns the arc [phi_i, phi_i + width_i]
    vx = np.roll(V[:, 0], -1)
    vy = np.roll(V[:, 1], -1)

    def F(theta):
        s2 = np.sin(2 * theta)
        c2 = np.cos(2 * theta)
        fx = vx * (theta / 2 + s2 / 4) - vy * c2 / 4
        fy = -vx * c2 / 4 + vy * (theta / 2 - s2 / 4)
        return fx, fy

    bx, by = F(b)
    ax, ay = F(a)
    return np.array([(bx - ax).sum(), (by - ay).sum()]) / math.pi


def rectangular_hull(S):
    """Smallest axis-aligned rectangle containing S (may degenerate)."""
    lo, hi = S.bounding_box()
    return ConvexBody([[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]])


def support(K, u):
    """Support function of a body in direction u."""
    return K.support(u)

"""Hypothesis checking, core certification, and convex-geometry checkers.

Four-point feasibility is a phase-1 linear program: one slack variable t is
subtracted from every membership and pairwise-gauge constraint, so the LP is
always solvable and the verdict is the sign of the optimal slack. Core
certificates compare all-pairs Hausdorff ratios against a target constant.
The remaining checkers exercise the neighborhood-of-intersection inclusion,
its failure when the anchoring precondition is dropped, the companion
triple-intersection inclusion, and the modulus of squareness of a norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .errors import GeometryError, MalformedInputError, PreconditionError
from .geometry import (
    ConvexBody,
    PolygonalNorm,
    contains,
    directed_gap,
    hausdorff,
    intersect,
    minkowski_add_ball,
    point_body,
    separation,
)
from .metricspace import subsets_up_to
from .tolerances import EPS_CHECK, EPS_GEOM


def neighborhood_inflation(L, euclidean=False):
    """Inflation factor theta(L) for the neighborhood-of-intersection bound:
    (3L+1)/(L-1) in general, 1 + 2L/sqrt(L^2-1) under a Euclidean norm."""
    if not L > 1:
        raise GeometryError("inflation factor needs L > 1")
    if euclidean:
        return 1.0 + 2.0 * L / math.sqrt(L * L - 1.0)
    return (3.0 * L + 1.0) / (L - 1.0)


def phi_bound(beta):
    """Universal upper bound (1+beta)/(1-beta) for the modulus of squareness."""
    return (1.0 + beta) / (1.0 - beta)


def psi_euclidean(beta):
    """Euclidean modulus of squareness (1-beta^2)^(-1/2)."""
    return 1.0 / math.sqrt(1.0 - beta * beta)


def ball_body(norm, center, r):
    """The ball center + r * unit ball as a body (a point when r = 0)."""
    if r < 0 or not np.isfinite(r):
        raise GeometryError("ball radius must be finite and nonnegative")
    c = np.asarray(center, dtype=float)
    if r == 0:
        return point_body(c)
    return ConvexBody(norm.ball_vertices * r + c, canonical=True)


# ---------------------------------------------------------------------------
# finite-subset hypothesis


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    witness: np.ndarray | None
    slack: float
    indeterminate: bool = False


@dataclass(frozen=True)
class HypothesisResult:
    ok: bool
    failing_subset: tuple | None = None
    indeterminate: bool = False


def subset_feasible(bodies, dsub, bound, norm):
    """Existence of points p_i in bodies[i] with gauge(p_i - p_j) <= bound * d_ij.

    Solved as a phase-1 LP over the 2*len(bodies) coordinates plus one slack.
    An LP backend failure is retried once with a perturbed right-hand side
    and then reported as an indeterminate (conservatively infeasible) result.
    """
    k = len(bodies)
    d = np.asarray(dsub, dtype=float)
    if d.shape != (k, k):
        raise MalformedInputError("restricted distance matrix shape mismatch")
    scale = max([1.0] + [b.scale for b in bodies])
    rows = []
    rhs = []
    nvar = 2 * k + 1
    for i, b in enumerate(bodies):
        N, o = b.halfplanes()
        block = np.zeros((len(N), nvar))
        block[:, 2 * i:2 * i + 2] = N
        block[:, -1] = -1.0
        rows.append(block)
        rhs.append(o)
    gauge_rows = norm._rows
    for i in range(k):
        for j in range(i + 1, k):
            rho = d[i, j]
            if not np.isfinite(rho):
                continue
            block = np.zeros((len(gauge_rows), nvar))
            block[:, 2 * i:2 * i + 2] = gauge_rows
            block[:, 2 * j:2 * j + 2] = -gauge_rows
            block[:, -1] = -1.0
            rows.append(block)
            rhs.append(np.full(len(gauge_rows), bound * rho))
    A = np.vstack(rows)
    b_ub = np.concatenate(rhs)
    c = np.zeros(nvar)
    c[-1] = 1.0
    for shift in (0.0, EPS_GEOM * scale):
        res = linprog(c, A_ub=A, b_ub=b_ub + shift, bounds=[(None, None)] * nvar,
                      method="highs")
        if res.status == 0:
            slack = float(res.x[-1]) - shift
            ok = slack <= EPS_CHECK * scale
            witness = res.x[:-1].reshape(k, 2) if ok else None
            return FeasibilityResult(ok, witness, slack)
    return FeasibilityResult(False, None, float("nan"), indeterminate=True)


def check_hypothesis(F, max_size=4, bound=1.0):
    """Whether every subset of at most max_size points admits a selection
    with Lipschitz seminorm at most bound; reports the first failing subset."""
    if max_size < 1 or bound <= 0:
        raise MalformedInputError("need max_size >= 1 and bound > 0")
    d = F.space.d
    indeterminate = False
    for subset in subsets_up_to(F.space, min(max_size, F.space.n)):
        bodies = [F.bodies[i] for i in subset]
        if any(b is None for b in bodies):
            return HypothesisResult(False, subset, indeterminate)
        if len(subset) == 1:
            continue
        sub = d[np.ix_(subset, subset)]
        res = subset_feasible(bodies, sub, bound, F.norm)
        indeterminate = indeterminate or res.indeterminate
        if not res.feasible:
            return HypothesisResult(False, subset, indeterminate)
    return HypothesisResult(True, None, indeterminate)


# ---------------------------------------------------------------------------
# core certification


@dataclass(frozen=True)
class CoreCertificate:
    gamma: float
    nonempty: bool
    subset_containment: bool
    max_ratio: float
    witness: dict | None = None
    slack_factor: float = 1.0

    @property
    def valid(self):
        return bool(self.nonempty and self.subset_containment
                    and self.max_ratio <= self.gamma * self.slack_factor + EPS_CHECK)

    def as_dict(self):
        return {
            "gamma": self.gamma,
            "nonempty": self.nonempty,
            "subset_containment": self.subset_containment,
            "max_ratio": self.max_ratio,
            "slack_factor": self.slack_factor,
            "valid": self.valid,
            "witness": self.witness,
        }


def certify_core(F, G, gamma, slack_factor=1.0):
    """Certificate that G is a gamma-core of F: per-point containment
    G(x) in F(x) plus the all-pairs Hausdorff ratio bound gamma.

    slack_factor widens the ratio comparison multiplicatively; it absorbs
    the polygonal surrogate's distortion when the nominal constant refers to
    the true Euclidean norm.
    """
    if F.space is not G.space and F.space.d.shape != G.space.d.shape:
        raise MalformedInputError("mappings live on different spaces")
    labels = F.space.labels
    empties = G.empty_points()
    if empties:
        return CoreCertificate(gamma, False, False, float("inf"),
                               {"empty_at": labels[empties[0]]}, slack_factor)
    containment = True
    witness = None
    for i, (f, g) in enumerate(zip(F.bodies, G.bodies)):
        if f is None or not contains(f, g, slack=1.0):
            containment = False
            witness = {"containment_fails_at": labels[i]}
            break
    d = F.space.d
    scale = max(1.0, G.coordinate_scale())
    max_ratio = 0.0
    worst = None
    for i in range(F.space.n):
        for j in range(i + 1, F.space.n):
            rho = d[i, j]
            if not np.isfinite(rho):
                continue
            h = hausdorff(G.bodies[i], G.bodies[j], G.norm)
            if rho == 0.0:
                if h > EPS_CHECK * scale:
                    max_ratio = float("inf")
                    worst = (labels[i], labels[j], h, rho)
                continue
            ratio = float(h / rho)
            if ratio > max_ratio:
                max_ratio = ratio
                worst = (labels[i], labels[j], h, rho)
    if witness is None and worst is not None and max_ratio > gamma * slack_factor + EPS_CHECK:
        witness = {"worst_pair": worst[:2], "hausdorff": worst[2], "rho": worst[3]}
    return CoreCertificate(gamma, True, containment, max_ratio, witness, slack_factor)


# ---------------------------------------------------------------------------
# neighborhood-of-intersection checkers


def check_neighborhood_inclusion(C, a, r, s, L, norm, euclidean_theta=False, tol=None):
    """Verify that [C cap B(a, L r)] + theta(L) s B contains (C + s B) cap
    B(a, L r + s), given that C meets B(a, r).

    Returns (ok, margin) where margin is the worst escape depth of the right
    side beyond the left side (0 when the inclusion holds exactly).
    """
    if s <= 0 or not L > 1 or r < 0:
        raise MalformedInputError("need s > 0, L > 1, r >= 0")
    scale = max(C.scale, float(np.abs(a).max()), 1.0)
    if tol is None:
        tol = EPS_CHECK * scale
    anchor = ball_body(norm, a, r)
    if separation(C, anchor, norm) > EPS_GEOM * scale:
        raise PreconditionError("C does not meet the anchoring ball B(a, r)")
    theta = neighborhood_inflation(L, euclidean_theta)
    G = intersect([C, ball_body(norm, a, L * r)])
    if G is None:
        raise PreconditionError("C misses B(a, L r) despite the anchor check")
    lhs = minkowski_add_ball(G, theta * s, norm)
    rhs = intersect([minkowski_add_ball(C, s, norm), ball_body(norm, a, L * r + s)])
    if rhs is None:
        return True, 0.0
    margin = directed_gap(rhs, lhs, norm)
    return margin <= tol, margin


def neighborhood_counterexample_depth(r_over_s):
    """How badly the neighborhood inclusion fails without its anchor.

    Under the max norm with L = 2 (theta = 7), a long sloped-top slab C that
    misses B(a, r) but clips a thin sliver off B(a, 2r) makes the right side
    (C + sB) cap B(a, 2r + s) sweep far along the square's bottom edge while
    [C cap B(a, 2r)] + 7sB stays near the sliver. Returns the escape depth,
    which grows with r/s.
    """
    if r_over_s < 10:
        raise MalformedInputError("construction needs r/s >= 10")
    norm = PolygonalNorm.linf()
    s = 1.0
    r = float(r_over_s) * s
    L = 2.0
    theta = neighborhood_inflation(L)  # = 7
    a = np.zeros(2)
    slope = s / r
    width = r / 2  # sliver width along the bottom edge of B(a, 2r)
    # top boundary: x2 = c + slope * x1, crossing x2 = -2r at x1 = 2r - width
    c = -2 * r - slope * (2 * r - width)
    X = 3 * r
    C = ConvexBody([[-X, -3 * r], [X, -3 * r], [X, c + slope * X], [-X, c - slope * X]])
    assert separation(C, ball_body(norm, a, r), norm) > 0
    G = intersect([C, ball_body(norm, a, L * r)])
    lhs = minkowski_add_ball(G, theta * s, norm)
    rhs = intersect([minkowski_add_ball(C, s, norm), ball_body(norm, a, L * r + s)])
    return directed_gap(rhs, lhs, norm)


def shifted_counterexample_body(r_over_s):
    """The counterexample slab translated up just enough to meet B(a, r),
    turning the failing configuration into one the inclusion covers."""
    norm = PolygonalNorm.linf()
    s = 1.0
    r = float(r_over_s) * s
    slope = s / r
    width = r / 2
    c = -2 * r - slope * (2 * r - width)
    X = 3 * r
    lift = (-r - (c + slope * r)) + 0.1 * r
    C = ConvexBody([[-X, -3 * r], [X, -3 * r],
                    [X, c + lift + slope * X], [-X, c + lift - slope * X]])
    return C, np.zeros(2), r, s, norm


def check_triple_inclusion(C, C1, C2, r, L, eps, norm,
                           euclidean_theta=False, segment_variant=None, tol=None):
    """Verify the inflated-intersection inclusion for a triple C, C1, C2:

        [{(C1 cap C2) + L r B} cap C] + theta(L) eps B
            contains
        [(C1 cap C2) + (L r + eps) B] cap [{(C1 + r B) cap C} + eps B]
                                      cap [{(C2 + r B) cap C} + eps B]

    given C1 cap C2 cap (C + r B) nonempty. When C1 is a segment (or
    segment_variant=True) the stronger two-term right side that drops the C2
    factor is checked instead.
    """
    if r < 0 or eps <= 0 or not L > 1:
        raise MalformedInputError("need r >= 0, eps > 0, L > 1")
    scale = max(C.scale, C1.scale, C2.scale, 1.0)
    if tol is None:
        tol = EPS_CHECK * scale
    if segment_variant is None:
        segment_variant = C1.dim <= 1
    inflC = minkowski_add_ball(C, r, norm)
    if intersect([C1, C2, inflC]) is None:
        raise PreconditionError("C1, C2 and C + r B have no common point")
    inner = intersect([C1, C2])
    theta = neighborhood_inflation(L, euclidean_theta)
    core = intersect([minkowski_add_ball(inner, L * r, norm), C])
    if core is None:
        raise PreconditionError("(C1 cap C2) + L r B misses C")
    lhs = minkowski_add_ball(core, theta * eps, norm)
    parts = [minkowski_add_ball(inner, L * r + eps, norm)]
    p1 = intersect([minkowski_add_ball(C1, r, norm), C])
    parts.append(minkowski_add_ball(p1, eps, norm) if p1 is not None else None)
    if not segment_variant:
        p2 = intersect([minkowski_add_ball(C2, r, norm), C])
        parts.append(minkowski_add_ball(p2, eps, norm) if p2 is not None else None)
    if any(p is None for p in parts):
        return True, 0.0
    rhs = intersect(parts)
    if rhs is None:
        return True, 0.0
    margin = directed_gap(rhs, lhs, norm)
    return margin <= tol, margin


# ---------------------------------------------------------------------------
# modulus of squareness


def modulus_of_squareness(norm, beta, samples=100_000, rng=None):
    """Sampled modulus of squareness: the largest observed ratio
    gauge(x - z) / (gauge(x) - 1) where z is the unit-sphere point of the
    segment [x, y], over gauge(y) <= beta < 1 < gauge(x).

    Sampling concentrates x just outside the unit sphere and y on the
    beta-sphere, where the supremum is approached. For the 'euclidean' norm
    kind the exact Euclidean gauge is used: the modulus only involves vector
    norms, and the polygonal surrogate's vertex corners inflate it by a
    first-order amount that has nothing to do with the round norm under test.
    """
    if not 0 <= beta < 1:
        raise MalformedInputError("beta must lie in [0, 1)")
    if samples < 10:
        raise MalformedInputError("need at least 10 samples")
    rng = np.random.default_rng(rng)
    m = int(samples)
    euclid = norm.kind == "euclidean"
    gauge_many = (lambda V: np.hypot(V[:, 0], V[:, 1])) if euclid else norm.gauge_many
    thx = rng.uniform(0.0, 2.0 * math.pi, m)
    ux = np.column_stack([np.cos(thx), np.sin(thx)])
    ux /= gauge_many(ux)[:, None]
    eta = np.where(rng.uniform(size=m) < 0.8,
                   10.0 ** rng.uniform(-6.0, -0.3, m),
                   rng.uniform(0.5, 3.0, m))
    X = ux * (1.0 + eta)[:, None]
    thy = rng.uniform(0.0, 2.0 * math.pi, m)
    uy = np.column_stack([np.cos(thy), np.sin(thy)])
    uy /= gauge_many(uy)[:, None]
    fac = np.where(rng.uniform(size=m) < 0.8, 1.0, rng.uniform(0.0, 1.0, m))
    Y = uy * (beta * fac)[:, None]
    D = X - Y
    if euclid:
        # unit-sphere crossing of y + t (x - y): positive root of |y + t D| = 1
        A = (D * D).sum(axis=1)
        B = 2.0 * (Y * D).sum(axis=1)
        Cc = (Y * Y).sum(axis=1) - 1.0
        t = (-B + np.sqrt(B * B - 4.0 * A * Cc)) / (2.0 * A)
    else:
        rows = norm._rows
        alpha = Y @ rows.T
        slope = D @ rows.T
        with np.errstate(divide="ignore", invalid="ignore"):
            tcand = np.where(slope > 0, (1.0 - alpha) / slope, np.inf)
        t = tcand.min(axis=1)
    Z = Y + t[:, None] * D
    omega = gauge_many(X - Z) / eta
    return float(omega.max())

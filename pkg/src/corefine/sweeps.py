"""Randomized property sweeps shared by the CLI 'theorems' command and the
test suite. Each sweep returns (ok, details) where details carries counts and
worst margins; all randomness is seed-driven.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import PreconditionError
from .generators import GeneratorConfig, interval_instance
from .geometry import (
    ConvexBody,
    PolygonalNorm,
    contains,
    directed_gap,
    hausdorff,
    intersect,
    minkowski_add_ball,
    point_body,
    rectangular_hull,
)
from .lowdim import (
    Interval,
    embed_intervals,
    extract_intervals,
    interval_core_check,
    interval_refinement,
)
from .refine import balanced_refinement
from .tolerances import EPS_CHECK
from .verify import (
    ball_body,
    check_neighborhood_inclusion,
    check_triple_inclusion,
    modulus_of_squareness,
    neighborhood_counterexample_depth,
    phi_bound,
    psi_euclidean,
    shifted_counterexample_body,
)


def random_hexagon_norm(rng):
    """Random centrally symmetric hexagon unit ball."""
    while True:
        angles = np.sort(rng.uniform(0.0, math.pi, 3))
        if np.diff(angles).min() < 0.25 or angles[0] + math.pi - angles[2] < 0.25:
            continue
        radii = rng.uniform(0.6, 1.6, 3)
        pts = radii[:, None] * np.column_stack([np.cos(angles), np.sin(angles)])
        body = ConvexBody(np.vstack([pts, -pts]))
        if len(body.vertices) == 6:
            return PolygonalNorm(body, kind="polygon")


def _random_polygon(rng, center, radius_lo=0.3, radius_hi=2.5, max_vertices=8):
    nv = int(rng.integers(3, max_vertices + 1))
    angles = np.sort(rng.uniform(0.0, 2.0 * math.pi, nv))
    radii = rng.uniform(radius_lo, radius_hi, nv)
    return ConvexBody(center + radii[:, None] * np.column_stack([np.cos(angles), np.sin(angles)]))


def norm_family(name, rng):
    if name == "linf":
        return PolygonalNorm.linf()
    if name == "l1":
        return PolygonalNorm.l1()
    if name == "euclid":
        return PolygonalNorm.euclidean(64)
    if name == "hexagon":
        return random_hexagon_norm(rng)
    raise ValueError(f"unknown norm family {name!r}")


def neighborhood_sweep(trials=500, seed=0, families=("linf", "hexagon", "euclid"), tol=None):
    """Random anchored configurations (C, a, r, s, L); the inclusion must hold
    for every one; the no-anchor counterexample must fail with positive,
    growing depth."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    checked = 0
    for fam in families:
        euclidean_theta = fam == "euclid"
        for _ in range(trials):
            norm = norm_family(fam, rng)
            L = float(rng.choice([2.0, 3.0, 5.0]))
            r = float(rng.uniform(0.2, 2.0))
            s = float(rng.uniform(0.1, 1.5))
            a = rng.uniform(-2.0, 2.0, 2)
            # anchor the body: one vertex planted inside B(a, r)
            inside = a + rng.uniform(-0.5, 0.5, 2) * r / norm.gauge_many(np.eye(2)).max()
            C = ConvexBody(np.vstack([_random_polygon(rng, rng.uniform(-3, 3, 2)).vertices, inside]))
            try:
                ok, margin = check_neighborhood_inclusion(
                    C, a, r, s, L, norm, euclidean_theta=euclidean_theta, tol=tol)
            except PreconditionError:
                continue
            checked += 1
            worst = max(worst, margin)
            if not ok:
                return False, {"checked": checked, "worst_margin": worst, "family": fam}
    d10 = neighborhood_counterexample_depth(10)
    d100 = neighborhood_counterexample_depth(100)
    C, a, r, s, norm_cx = shifted_counterexample_body(100)
    shifted_ok, _ = check_neighborhood_inclusion(C, a, r, s, 2.0, norm_cx)
    ok = d100 > d10 > 0 and shifted_ok
    return ok, {"checked": checked, "worst_margin": worst,
                "depth_10": d10, "depth_100": d100, "shifted_ok": shifted_ok}


def triple_inclusion_sweep(trials=500, seed=0, families=("linf", "hexagon", "euclid"),
                           segment_share=0.3, tol=None):
    """Random admissible triples (common point planted) for the inflated
    triple-intersection inclusion, including segment left factors."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    checked = 0
    segment_checked = 0
    for fam in families:
        euclidean_theta = fam == "euclid"
        for _ in range(trials):
            norm = norm_family(fam, rng)
            L = float(rng.choice([2.0, 3.0, 5.0]))
            r = float(rng.uniform(0.1, 1.5))
            eps = float(rng.uniform(0.05, 1.0))
            anchor = rng.uniform(-2.0, 2.0, 2)
            as_segment = rng.uniform() < segment_share
            if as_segment:
                th = rng.uniform(0, 2 * math.pi)
                u = np.array([math.cos(th), math.sin(th)])
                C1 = ConvexBody([anchor - rng.uniform(0.2, 2.0) * u,
                                 anchor + rng.uniform(0.2, 2.0) * u])
            else:
                C1 = ConvexBody(np.vstack([_random_polygon(rng, anchor + rng.uniform(-1, 1, 2)).vertices,
                                           anchor]))
            C2 = ConvexBody(np.vstack([_random_polygon(rng, anchor + rng.uniform(-1, 1, 2)).vertices,
                                       anchor]))
            # C itself sits within gauge distance r of the anchor
            off = rng.uniform(-1.0, 1.0, 2)
            off *= 0.9 * r / max(norm.gauge(off), 1e-9)
            C = ConvexBody(np.vstack([_random_polygon(rng, anchor + off + rng.uniform(-1, 1, 2)).vertices,
                                      anchor + off]))
            try:
                ok, margin = check_triple_inclusion(C, C1, C2, r, L, eps, norm,
                                                    euclidean_theta=euclidean_theta, tol=tol)
            except PreconditionError:
                continue
            checked += 1
            segment_checked += int(as_segment)
            worst = max(worst, margin)
            if not ok:
                return False, {"checked": checked, "worst_margin": worst, "family": fam}
    return True, {"checked": checked, "segment_checked": segment_checked, "worst_margin": worst}


def squareness_sweep(samples=100_000, seed=0, betas=None, rel_window=0.02):
    """Euclidean modulus must land within rel_window below its closed form;
    every polygonal norm stays below the universal bound."""
    rng = np.random.default_rng(seed)
    betas = betas if betas is not None else [round(0.1 * k, 1) for k in range(1, 10)]
    euc = PolygonalNorm.euclidean(64)
    hexn = random_hexagon_norm(rng)
    linf = PolygonalNorm.l1(), PolygonalNorm.linf()
    results = []
    ok = True
    for beta in betas:
        xi_e = modulus_of_squareness(euc, beta, samples, rng=rng)
        psi = psi_euclidean(beta)
        e_ok = (1.0 - rel_window) * psi <= xi_e <= psi * (1.0 + 1e-9)
        row = {"beta": beta, "xi_euclid": xi_e, "psi": psi, "euclid_ok": e_ok}
        for name, norm in (("linf", linf[1]), ("l1", linf[0]), ("hexagon", hexn)):
            xi = modulus_of_squareness(norm, beta, samples, rng=rng)
            row[f"xi_{name}"] = xi
            row[f"{name}_ok"] = xi <= phi_bound(beta) + EPS_CHECK
        ok = ok and e_ok and row["linf_ok"] and row["l1_ok"] and row["hexagon_ok"]
        # beta = 0 sanity: modulus tends to 1 for every norm
        results.append(row)
    xi0 = modulus_of_squareness(euc, 0.0, samples, rng=rng)
    ok = ok and abs(xi0 - 1.0) <= 1e-6
    return ok, {"rows": results, "xi_at_zero": xi0}


def helly_sweep(trials=200, seed=0, tol=None):
    """Intersection-and-inflation identities on random families:

    - inflating an intersection = intersecting pairwise inflations,
    - the square-inflation identity with the rectangular hull correction,
    - the rectangular hull as an intersection of two axis strips.
    """
    rng = np.random.default_rng(seed)
    linf = PolygonalNorm.linf()
    worst = 0.0
    for t in range(trials):
        anchor = rng.uniform(-2, 2, 2)
        k = int(rng.integers(2, 6))
        family = [ConvexBody(np.vstack([_random_polygon(rng, anchor + rng.uniform(-1, 1, 2)).vertices,
                                        anchor]))
                  for _ in range(k)]
        norm = norm_family(str(rng.choice(["linf", "hexagon", "euclid"])), rng)
        tau = float(rng.uniform(0.1, 1.5))
        tol_t = tol if tol is not None else EPS_CHECK * max(b.scale for b in family) * 10
        # inflated intersection identity over all pairs
        whole = intersect(family)
        lhs = minkowski_add_ball(whole, tau, norm)
        parts = []
        for i in range(k):
            for j in range(i, k):
                inner = intersect([family[i], family[j]])
                parts.append(minkowski_add_ball(inner, tau, norm))
        rhs = intersect(parts)
        gap = max(directed_gap(lhs, rhs, norm), directed_gap(rhs, lhs, norm))
        worst = max(worst, gap)
        if gap > tol_t:
            return False, {"trial": t, "failure": "intersection-inflation", "gap": gap}
        # two-body square inflation with rectangular hull correction
        K1, K2 = family[0], family[1]
        both = intersect([K1, K2])
        lhs2 = minkowski_add_ball(both, tau, linf)
        hull_term = rectangular_hull(lhs2)
        rhs2 = intersect([minkowski_add_ball(K1, tau, linf),
                          minkowski_add_ball(K2, tau, linf), hull_term])
        gap2 = max(directed_gap(lhs2, rhs2, linf), directed_gap(rhs2, lhs2, linf))
        worst = max(worst, gap2)
        if gap2 > tol_t:
            return False, {"trial": t, "failure": "square-inflation-hull", "gap": gap2}
        # rectangular hull via axis strips
        S = family[0]
        reach = 8.0 * S.scale
        strip_x = minkowski_sum_strip(S, np.array([reach, 0.0]))
        strip_y = minkowski_sum_strip(S, np.array([0.0, reach]))
        hull2 = intersect([strip_x, strip_y])
        target = rectangular_hull(S)
        gap3 = max(directed_gap(hull2, target, linf), directed_gap(target, hull2, linf))
        worst = max(worst, gap3)
        if gap3 > tol_t:
            return False, {"trial": t, "failure": "rectangular-hull", "gap": gap3}
    return True, {"trials": trials, "worst_gap": worst}


def minkowski_sum_strip(S, axis_vec):
    """S + [-axis_vec, +axis_vec] as a body (finite stand-in for S + axis line)."""
    from .geometry import minkowski_sum

    return minkowski_sum(S.vertices, np.vstack([-axis_vec, axis_vec]))


def segment_helly_sweep(trials=300, seed=0):
    """Pairwise-to-global intersection for families led by a segment: when the
    segment meets every pairwise intersection of the others, everything meets."""
    rng = np.random.default_rng(seed)
    hits = 0
    for t in range(trials):
        anchor = rng.uniform(-2, 2, 2)
        th = rng.uniform(0, 2 * math.pi)
        u = np.array([math.cos(th), math.sin(th)])
        K0 = ConvexBody([anchor - rng.uniform(0.5, 3.0) * u,
                         anchor + rng.uniform(0.5, 3.0) * u])
        family = [ConvexBody(np.vstack([_random_polygon(rng, anchor + rng.uniform(-0.8, 0.8, 2)).vertices,
                                        anchor + rng.uniform(-0.2, 0.2) * u]))
                  for _ in range(int(rng.integers(2, 6)))]
        # hypothesis: K0 meets every pair {K_i, K_j} (and every single K_i)
        pair_ok = True
        for i in range(len(family)):
            for j in range(i, len(family)):
                inner = intersect([family[i], family[j]])
                if inner is None or intersect([K0, inner]) is None:
                    pair_ok = False
                    break
            if not pair_ok:
                break
        if not pair_ok:
            continue
        hits += 1
        if intersect([K0] + family) is None:
            return False, {"trial": t, "failure": "segment-helly"}
    return True, {"applicable_trials": hits}


def lowdim_sweep(instances=200, seed=0, n_range=(3, 16), lam=1.0, gamma=1.0):
    """Interval refinement sweep: nonempty, core check at gamma, and agreement
    with the planar engine on embedded instances."""
    rng = np.random.default_rng(seed)
    worst_ratio = 0.0
    embed_checked = 0
    for t in range(instances):
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        cfg = GeneratorConfig(n=n, metric="random" if t % 2 else "tree",
                              seed=int(rng.integers(0, 2**32)))
        intervals, space, _ = interval_instance(cfg)
        f1 = interval_refinement(intervals, space, lam)
        if any(iv is None for iv in f1):
            return False, {"trial": t, "failure": "empty-refinement"}
        ok, ratio = interval_core_check(f1, space, gamma)
        worst_ratio = max(worst_ratio, ratio)
        if not ok:
            return False, {"trial": t, "failure": "core-ratio", "ratio": ratio}
        if t % 10 == 0:
            F = embed_intervals(intervals, space)
            emb = extract_intervals(balanced_refinement(F, lam))
            embed_checked += 1
            for a, b in zip(f1, emb):
                if b is None or abs(a.lo - b.lo) > EPS_CHECK or abs(a.hi - b.hi) > EPS_CHECK:
                    return False, {"trial": t, "failure": "embedding-mismatch"}
    return True, {"instances": instances, "worst_ratio": worst_ratio,
                  "embedding_checked": embed_checked}

"""Deterministic instance generators.

hidden_selection_instance plants a map g with Lipschitz seminorm at most 1
and wraps each value in a random body, so every finite subset admits a
bounded selection by construction. adversarial_instance drops the plant and
attaches the checked verdict instead. All randomness flows from the config
seed; identical configs produce identical instances.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import MalformedInputError
from .geometry import ConvexBody, PolygonalNorm, point_body
from .lowdim import Interval
from .metricspace import PseudometricSpace, metric_closure, tree_metric, WeightedTree
from .refine import SetValuedMap
from .selection import Selection, lipschitz_seminorm


@dataclass(frozen=True)
class GeneratorConfig:
    n: int
    metric: str = "tree"           # tree | random | euclidean
    norm: PolygonalNorm | None = None
    max_vertices: int = 8
    body_scale: float = 1.5        # radius range of bodies wrapped around the plant
    spread: float = 3.0            # spatial spread of planted values
    seed: int = 0
    point_prob: float = 0.08
    segment_prob: float = 0.12

    def __post_init__(self):
        if self.n < 1:
            raise MalformedInputError("need at least one point")
        if self.metric not in ("tree", "random", "euclidean"):
            raise MalformedInputError(f"unknown metric kind {self.metric!r}")
        if self.max_vertices < 3:
            raise MalformedInputError("polygon bodies need max_vertices >= 3")


def random_space(rng, n, kind, spread=3.0):
    """Random valid pseudometric space; euclidean kind also returns the
    underlying plane points (None otherwise)."""
    if n == 1:
        return PseudometricSpace([[0.0]]), (rng.uniform(-spread, spread, (1, 2))
                                            if kind == "euclidean" else None)
    if kind == "tree":
        edges = [(int(rng.integers(0, i)), i, float(rng.uniform(0.25, 2.0)))
                 for i in range(1, n)]
        return tree_metric(WeightedTree(n, edges)), None
    if kind == "random":
        m = rng.uniform(0.3, 3.0, (n, n))
        m = (m + m.T) / 2.0
        np.fill_diagonal(m, 0.0)
        return PseudometricSpace(metric_closure(m)), None
    pts = rng.uniform(-spread, spread, (n, 2))
    diff = pts[:, None, :] - pts[None, :, :]
    return PseudometricSpace(np.hypot(diff[..., 0], diff[..., 1])), pts


def planted_lipschitz(rng, space, norm, spread=3.0, plane_points=None):
    """Plant a map with gauge seminorm <= 1.

    Starts from random anchors and runs coordinatewise median clamping
    g(x) <- median(g(x), max_z (g(z) - rho), min_z (g(z) + rho)) until the
    max-norm seminorm settles at 1; an interpolation fallback guards the rare
    non-converged case. For norms other than the max norm the differences
    are then rescaled by the measured gauge seminorm. When the space comes
    from plane points the plant is a rigid motion of those points, which is
    an exact isometry before rescaling.
    """
    n = space.n
    d = space.d
    if plane_points is not None:
        th = rng.uniform(0.0, 2.0 * np.pi)
        rot = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
        g = plane_points @ rot.T + rng.uniform(-spread, spread, 2)
    else:
        g = rng.uniform(-spread, spread, (n, 2))
        g = _clamp_to_unit_linf(g, d)
    s = lipschitz_seminorm(g, space, norm)
    if s > 1.0:
        center = g.mean(axis=0)
        g = center + (g - center) / s
    return g


def _linf_seminorm(g, d):
    worst = 0.0
    for i in range(len(g)):
        for j in range(i + 1, len(g)):
            rho = d[i, j]
            if not np.isfinite(rho) or rho == 0.0:
                continue
            worst = max(worst, np.abs(g[i] - g[j]).max() / rho)
    return worst


def _clamp_to_unit_linf(g, d):
    n = len(g)
    g = g.copy()
    for _ in range(50):
        for x in range(n):
            dx = d[:, x].copy()
            dx[x] = np.inf
            lo = np.where(np.isfinite(dx)[:, None], g - dx[:, None], -np.inf).max(axis=0)
            hi = np.where(np.isfinite(dx)[:, None], g + dx[:, None], np.inf).min(axis=0)
            g[x] = np.median(np.stack([g[x], lo, hi]), axis=0)
        if _linf_seminorm(g, d) <= 1.0 + 1e-12:
            return g
    # fallback: 1-Lipschitz interpolation of the current values along the metric
    out = np.empty_like(g)
    for x in range(n):
        dx = d[:, x]
        finite = np.isfinite(dx)
        out[x] = (g[finite] + dx[finite, None]).min(axis=0)
    return out


def _polygon_around(rng, p, cfg):
    nv = int(rng.integers(3, cfg.max_vertices + 1))
    for _ in range(40):
        angles = np.sort(rng.uniform(0.0, 2.0 * np.pi, nv))
        gaps = np.diff(np.concatenate([angles, [angles[0] + 2.0 * np.pi]]))
        if gaps.max() < np.pi - 0.15:
            break
    else:
        angles = np.sort(2.0 * np.pi * np.arange(nv) / nv + rng.uniform(0, 0.4, nv))
    radii = rng.uniform(0.25, max(0.3, cfg.body_scale), nv)
    verts = p + radii[:, None] * np.column_stack([np.cos(angles), np.sin(angles)])
    return ConvexBody(verts)


def _segment_through(rng, p, cfg):
    th = rng.uniform(0.0, 2.0 * np.pi)
    u = np.array([np.cos(th), np.sin(th)])
    a, b = rng.uniform(0.2, max(0.25, cfg.body_scale), 2)
    return ConvexBody([p - a * u, p + b * u])


def _body_around(rng, p, cfg):
    roll = rng.uniform()
    if roll < cfg.point_prob:
        return point_body(p)
    if roll < cfg.point_prob + cfg.segment_prob:
        return _segment_through(rng, p, cfg)
    return _polygon_around(rng, p, cfg)


def hidden_selection_instance(cfg):
    """Instance with a planted selection of seminorm <= 1; returns the map
    and the plant (with its measured seminorm)."""
    rng = np.random.default_rng(cfg.seed)
    norm = cfg.norm or PolygonalNorm.linf()
    space, pts = random_space(rng, cfg.n, cfg.metric, cfg.spread)
    g = planted_lipschitz(rng, space, norm, cfg.spread, plane_points=pts)
    bodies = [_body_around(rng, g[x], cfg) for x in range(cfg.n)]
    F = SetValuedMap(space, norm, bodies)
    plant = Selection(points=g, seminorm=lipschitz_seminorm(g, space, norm))
    return F, plant


def adversarial_instance(cfg, bound=1.0):
    """Random bodies with no plant, plus the finite-subset verdict."""
    from .verify import check_hypothesis  # deferred: verify imports geometry only

    rng = np.random.default_rng(cfg.seed)
    norm = cfg.norm or PolygonalNorm.linf()
    space, _ = random_space(rng, cfg.n, cfg.metric, cfg.spread)
    centers = rng.uniform(-2.0 * cfg.spread, 2.0 * cfg.spread, (cfg.n, 2))
    bodies = [_body_around(rng, centers[x], cfg) for x in range(cfg.n)]
    F = SetValuedMap(space, norm, bodies)
    return F, check_hypothesis(F, 4, bound)


def segment_instance(cfg):
    """Hidden-selection instance whose bodies are segments (or points)
    through the plant."""
    rng = np.random.default_rng(cfg.seed)
    norm = cfg.norm or PolygonalNorm.linf()
    space, pts = random_space(rng, cfg.n, cfg.metric, cfg.spread)
    g = planted_lipschitz(rng, space, norm, cfg.spread, plane_points=pts)
    bodies = []
    for x in range(cfg.n):
        if rng.uniform() < cfg.point_prob:
            bodies.append(point_body(g[x]))
        else:
            bodies.append(_segment_through(rng, g[x], cfg))
    F = SetValuedMap(space, norm, bodies)
    plant = Selection(points=g, seminorm=lipschitz_seminorm(g, space, norm))
    return F, plant


def interval_instance(cfg):
    """1D hidden-selection instance: intervals around a planted scalar map of
    seminorm <= 1 on the line."""
    rng = np.random.default_rng(cfg.seed)
    space, _ = random_space(rng, cfg.n, cfg.metric, cfg.spread)
    d = space.d
    anchors = rng.uniform(-cfg.spread, cfg.spread, (cfg.n, 1))
    g = _clamp_to_unit_linf(anchors, d)[:, 0]
    widths = rng.uniform(0.0, max(0.2, cfg.body_scale), (cfg.n, 2))
    intervals = [Interval(float(g[x] - widths[x, 0]), float(g[x] + widths[x, 1]))
                 for x in range(cfg.n)]
    return intervals, space, g


def with_seed(cfg, seed):
    return replace(cfg, seed=seed)

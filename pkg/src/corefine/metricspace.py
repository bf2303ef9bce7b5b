"""Finite pseudometric spaces and weighted trees.

A pseudometric allows zero distance between distinct points and +inf
entries; +inf is a plain sentinel (numpy handles the arithmetic). Spaces are
immutable after construction and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import MalformedInputError

TRIANGLE_RTOL = 1e-12


class PseudometricSpace:
    """Finite point set with a symmetric nonnegative distance matrix."""

    __slots__ = ("labels", "d")

    def __init__(self, d, labels=None):
        d = np.asarray(d, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1] or d.shape[0] == 0:
            raise MalformedInputError(f"distance matrix must be square, got shape {d.shape}")
        if np.isnan(d).any() or (d < 0).any():
            raise MalformedInputError("distances must be nonnegative (nan not allowed)")
        self.d = d.copy()
        self.d.setflags(write=False)
        n = d.shape[0]
        if labels is None:
            labels = [f"p{i}" for i in range(n)]
        if len(labels) != n:
            raise MalformedInputError("label count does not match matrix size")
        self.labels = list(labels)

    @property
    def n(self):
        return self.d.shape[0]

    def index(self, label):
        return self.labels.index(label)

    def __repr__(self):
        return f"PseudometricSpace(n={self.n})"


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    reason: str = ""
    witness: tuple | None = None


def metric_closure(d):
    """All-pairs shortest-path (min-plus) closure; +inf entries pass through."""
    d = np.array(d, dtype=float)
    n = d.shape[0]
    for k in range(n):
        np.minimum(d, d[:, k, None] + d[None, k, :], out=d)
    return d


def validate(space):
    """Check the pseudometric axioms; reports the first violating entry/triple."""
    d = space.d
    n = space.n
    if (np.diag(d) != 0).any():
        i = int(np.nonzero(np.diag(d))[0][0])
        return ValidationReport(False, "nonzero diagonal", (i, i))
    asym = d != d.T
    if asym.any():
        i, j = map(int, np.argwhere(asym)[0])
        return ValidationReport(False, "asymmetric entry", (i, j))
    closure = metric_closure(d)
    tol = TRIANGLE_RTOL * np.maximum(1.0, np.where(np.isfinite(d), d, 0.0))
    finite = np.isfinite(d)
    bad = finite & (closure < d - tol)
    if bad.any():
        i, j = map(int, np.argwhere(bad)[0])
        via = d[i, :] + d[:, j]
        k = int(np.argmin(via))
        return ValidationReport(False, "triangle inequality violated", (i, k, j))
    # an infinite entry with a finite path through some k also breaks the axiom
    bad_inf = (~finite) & np.isfinite(closure)
    np.fill_diagonal(bad_inf, False)
    if bad_inf.any():
        i, j = map(int, np.argwhere(bad_inf)[0])
        via = d[i, :] + d[:, j]
        k = int(np.argmin(via))
        return ValidationReport(False, "triangle inequality violated", (i, k, j))
    return ValidationReport(True)


def scale(space, lam):
    """New space with every distance multiplied by lam > 0 (+inf stays +inf)."""
    if not (np.isfinite(lam) and lam > 0):
        raise MalformedInputError("scale factor must be positive and finite")
    return PseudometricSpace(space.d * lam, space.labels)


class WeightedTree:
    """Tree on n nodes with positive edge weights."""

    __slots__ = ("n", "labels", "edges")

    def __init__(self, n, edges, labels=None):
        self.n = int(n)
        self.edges = [(int(a), int(b), float(w)) for a, b, w in edges]
        for a, b, w in self.edges:
            if not (0 <= a < self.n and 0 <= b < self.n and a != b):
                raise MalformedInputError(f"bad edge ({a}, {b})")
            if not (np.isfinite(w) and w > 0):
                raise MalformedInputError("edge weights must be positive and finite")
        if len(self.edges) != self.n - 1:
            raise MalformedInputError("a tree on n nodes has exactly n-1 edges")
        self.labels = list(labels) if labels is not None else [f"p{i}" for i in range(self.n)]


def tree_metric(tree):
    """Path-length metric of a weighted tree."""
    n = tree.n
    d = np.full((n, n), np.inf)
    np.fill_diagonal(d, 0.0)
    for a, b, w in tree.edges:
        d[a, b] = d[b, a] = min(d[a, b], w)
    d = metric_closure(d)
    if not np.isfinite(d).all():
        raise MalformedInputError("tree is disconnected")
    return PseudometricSpace(d, tree.labels)


def subsets_up_to(space, k):
    """Yield every index subset of size 1..k exactly once."""
    n = space.n if isinstance(space, PseudometricSpace) else int(space)
    if not 1 <= k <= n:
        raise MalformedInputError("subset size cap must lie in [1, n]")
    for size in range(1, k + 1):
        yield from combinations(range(n), size)

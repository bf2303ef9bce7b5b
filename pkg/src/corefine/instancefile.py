"""Instance file format (JSON) and round-trip helpers.

Planar instances carry a norm config, a labeled distance matrix ("inf"
encodes infinite distance), one vertex list per label, and optionally the
refinement rates, the target core constant, a planted selection and the
generator seed. Interval instances replace vertex lists by [lo, hi] pairs
and need no norm.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import MalformedInputError
from .geometry import ConvexBody, PolygonalNorm
from .lowdim import Interval
from .metricspace import PseudometricSpace
from .refine import SetValuedMap


@dataclass
class InstanceData:
    kind: str                              # "planar" | "intervals"
    space: PseudometricSpace
    norm: PolygonalNorm | None = None
    bodies: list | None = None             # ConvexBody list for planar
    intervals: list | None = None          # Interval list for 1D
    lambdas: tuple | None = None
    gamma: float | None = None
    selection: np.ndarray | None = None    # planted values, (n, 2) or (n,)
    seed: int | None = None
    preset: str | None = None

    def to_map(self):
        if self.kind != "planar":
            raise MalformedInputError("interval instances have no planar map")
        return SetValuedMap(self.space, self.norm, self.bodies)


def _encode_distance(v):
    return "inf" if np.isinf(v) else float(v)

def _decode_distance(v):
    if v == "inf" or v == float("inf"):
        return np.inf
    return float(v)


def instance_to_dict(data):
    metric = {"labels": list(data.space.labels),
              "d": [[_encode_distance(v) for v in row] for row in data.space.d]}
    out = {"kind": data.kind, "metric": metric}
    if data.kind == "planar":
        out["norm"] = data.norm.to_config()
        out["sets"] = {lab: b.vertices.tolist()
                       for lab, b in zip(data.space.labels, data.bodies)}
    else:
        out["sets"] = {lab: [iv.lo, iv.hi]
                       for lab, iv in zip(data.space.labels, data.intervals)}
    if data.lambdas is not None:
        out["lambdas"] = [float(v) for v in data.lambdas]
    if data.gamma is not None:
        out["gamma"] = float(data.gamma)
    if data.selection is not None:
        sel = np.asarray(data.selection, dtype=float)
        if data.kind == "planar":
            out["selection"] = {lab: [float(p[0]), float(p[1])]
                                for lab, p in zip(data.space.labels, sel)}
        else:
            out["selection"] = {lab: float(v)
                                for lab, v in zip(data.space.labels, sel)}
    if data.seed is not None:
        out["seed"] = int(data.seed)
    if data.preset is not None:
        out["preset"] = data.preset
    return out


def instance_from_dict(doc):
    try:
        kind = doc.get("kind", "planar")
        metric = doc["metric"]
        labels = list(metric["labels"])
        d = np.array([[_decode_distance(v) for v in row] for row in metric["d"]])
        space = PseudometricSpace(d, labels)
        sets = doc["sets"]
        if set(sets) != set(labels):
            raise MalformedInputError("set labels do not match metric labels")
        lambdas = tuple(float(v) for v in doc["lambdas"]) if "lambdas" in doc else None
        gamma = float(doc["gamma"]) if "gamma" in doc else None
        seed = int(doc["seed"]) if "seed" in doc else None
        preset = doc.get("preset")
        selection = None
        if kind == "planar":
            norm = PolygonalNorm.from_config(doc["norm"])
            bodies = [ConvexBody(sets[lab]) for lab in labels]
            if "selection" in doc:
                selection = np.array([doc["selection"][lab] for lab in labels], dtype=float)
            return InstanceData("planar", space, norm=norm, bodies=bodies,
                                lambdas=lambdas, gamma=gamma, selection=selection,
                                seed=seed, preset=preset)
        if kind == "intervals":
            intervals = [Interval(float(sets[lab][0]), float(sets[lab][1])) for lab in labels]
            if "selection" in doc:
                selection = np.array([doc["selection"][lab] for lab in labels], dtype=float)
            return InstanceData("intervals", space, intervals=intervals,
                                lambdas=lambdas, gamma=gamma, selection=selection,
                                seed=seed, preset=preset)
        raise MalformedInputError(f"unknown instance kind {kind!r}")
    except MalformedInputError:
        raise
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise MalformedInputError(f"malformed instance document: {exc}") from exc


def dumps(data):
    return json.dumps(instance_to_dict(data), sort_keys=True)


def loads(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInputError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise MalformedInputError("instance document must be a JSON object")
    return instance_from_dict(doc)


def save(data, path):
    with open(path, "w") as fh:
        fh.write(dumps(data))
        fh.write("\n")


def load(path):
    with open(path) as fh:
        return loads(fh.read())

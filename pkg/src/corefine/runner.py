"""Experiment orchestration: presets, the per-instance pipeline, batch runs
and CSV reports.

A preset fixes one row of the constant table: the norm family, the way the
metric is drawn, the body shape, the refinement rates and the core constant
the certificate is checked against. The pipeline refines twice, certifies
the second refinement as a core, checks stabilization at the core constant
and extracts the Steiner selection; every PASS field in the report is backed
by the measured number next to it.
"""

from __future__ import annotations

import csv
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import CertificationError, CorefineError, MalformedInputError
from .generators import GeneratorConfig, hidden_selection_instance, interval_instance, segment_instance
from .geometry import PolygonalNorm, contains, point_body
from .instancefile import InstanceData
from .lowdim import interval_core_check, interval_hausdorff, interval_refinement
from .refine import RefinementSchedule, find_empty_witness, iterate, stabilization_check
from .selection import lipschitz_seminorm, steiner_selection
from .sweeps import random_hexagon_norm
from .verify import certify_core, check_hypothesis

THREADS_ENV = "COREFINE_THREADS"
SELECTION_CEILING = 10.0  # configured ceiling c_S for seminorm / gamma


@dataclass(frozen=True)
class Preset:
    name: str
    lambdas: tuple
    gamma: float
    norm_kind: str          # linf | hexagon | euclid
    metric_kind: str        # mixed | euclidean | tree | random
    bodies: str             # polygon | segment | interval
    fold_distortion: bool = False


PRESETS = {
    "linf": Preset("linf", (1.0, 3.0), 15.0, "linf", "mixed", "polygon"),
    "general2d": Preset("general2d", (4.0 / 3.0, 4.0), 100.0, "hexagon", "mixed", "polygon"),
    "euclid": Preset("euclid", (4.0 / math.pi, 12.0 / math.pi), 38.0, "euclid", "mixed",
                     "polygon", fold_distortion=True),
    "euclid-submetric": Preset("euclid-submetric", (1.0, 3.0), 25.0, "euclid", "euclidean",
                               "polygon", fold_distortion=True),
    "segments": Preset("segments", (1.0, 3.0), 15.0, "hexagon", "mixed", "segment"),
    "segments-euclid": Preset("segments-euclid", (1.0, 3.0), 10.0, "euclid", "mixed",
                              "segment", fold_distortion=True),
    "intervals": Preset("intervals", (1.0,), 1.0, "linf", "mixed", "interval"),
}


def preset_norm(preset, seed):
    if preset.norm_kind == "linf":
        return PolygonalNorm.linf()
    if preset.norm_kind == "euclid":
        return PolygonalNorm.euclidean(64)
    return random_hexagon_norm(np.random.default_rng((seed << 8) ^ 0x9E3779B9))


def _metric_for(preset, seed):
    if preset.metric_kind == "mixed":
        return "tree" if seed % 2 == 0 else "random"
    return preset.metric_kind


def build_instance(preset_name, n, seed, norm=None):
    """Deterministic instance for a preset; carries rates, gamma and plant."""
    preset = PRESETS[preset_name]
    metric = _metric_for(preset, seed)
    norm = norm or preset_norm(preset, seed)
    cfg = GeneratorConfig(n=n, metric=metric, norm=norm, seed=seed)
    if preset.bodies == "interval":
        intervals, space, g = interval_instance(cfg)
        return InstanceData("intervals", space, intervals=intervals,
                            lambdas=preset.lambdas, gamma=preset.gamma,
                            selection=g, seed=seed, preset=preset_name)
    make = segment_instance if preset.bodies == "segment" else hidden_selection_instance
    F, plant = make(cfg)
    return InstanceData("planar", F.space, norm=F.norm, bodies=F.bodies,
                        lambdas=preset.lambdas, gamma=preset.gamma,
                        selection=plant.points, seed=seed, preset=preset_name)


def run_planar(F, lambdas, gamma, slack_factor=1.0, with_hypothesis=False,
               hypothesis_bound=1.0, with_stabilization=True, with_selection=True):
    """Refine, certify, stabilize, select. Returns a flat report dict."""
    t0 = time.perf_counter()
    report = {
        "kind": "planar", "n": F.space.n, "norm": F.norm.kind,
        "lambda1": lambdas[0], "lambda2": lambdas[1] if len(lambdas) > 1 else None,
        "gamma": gamma, "status": "ok", "hypothesis": None, "indeterminate": False,
        "witness": None,
    }
    if with_hypothesis:
        hyp = check_hypothesis(F, 4, hypothesis_bound)
        report["hypothesis"] = hyp.ok
        report["indeterminate"] = hyp.indeterminate
        if not hyp.ok:
            report["witness"] = {"hypothesis_subset": [F.space.labels[i] for i in hyp.failing_subset]}
    schedule = RefinementSchedule(lambdas, gamma)
    steps = min(2, len(lambdas))
    chain = iterate(F, schedule, steps)
    report["iterate_nonempty"] = [lvl.nonempty_everywhere() for lvl in chain]
    if not report["iterate_nonempty"][-1]:
        level = next(k for k in range(1, steps + 1) if not chain[k].nonempty_everywhere())
        x = chain[level].empty_points()[0]
        witness = find_empty_witness(chain[level - 1], lambdas[level - 1], x)
        report.update(status="refinement-empty", cert_valid=False, max_ratio=float("inf"),
                      ratio_quotient=float("inf"), stabilization_ok=False,
                      stabilization_defect=float("inf"), selection_seminorm=None,
                      selection_contained=None,
                      witness={"empty_level": level, "empty_at": F.space.labels[x],
                               "term_subset": [F.space.labels[z] for z in witness]})
        report["wall_time"] = time.perf_counter() - t0
        return report
    F2 = chain[-1]
    cert = certify_core(F, F2, gamma, slack_factor)
    report["cert_valid"] = cert.valid
    report["max_ratio"] = cert.max_ratio
    report["ratio_quotient"] = cert.max_ratio / gamma if gamma else float("inf")
    report["subset_containment"] = cert.subset_containment
    if cert.witness and report["witness"] is None:
        report["witness"] = cert.witness
    if with_stabilization:
        stab_ok, defect = stabilization_check(F2, gamma)
        report["stabilization_ok"] = stab_ok
        report["stabilization_defect"] = defect
    if with_selection:
        try:
            sel = steiner_selection(F2)
            report["selection_seminorm"] = sel.seminorm
            report["selection_contained"] = all(
                contains(b, point_body(p), slack=1.0)
                for b, p in zip(F.bodies, sel.points))
        except CertificationError as exc:
            report["selection_seminorm"] = None
            report["selection_contained"] = False
            report["status"] = "selection-failed"
            report["witness"] = {"empty_at": exc.label}
    report["wall_time"] = time.perf_counter() - t0
    return report


def run_intervals(intervals, space, lam1, gamma):
    """Closed-form 1D pipeline: refinement, core check, stabilization."""
    t0 = time.perf_counter()
    report = {"kind": "intervals", "n": space.n, "norm": "line",
              "lambda1": lam1, "lambda2": None, "gamma": gamma,
              "status": "ok", "hypothesis": None, "indeterminate": False, "witness": None}
    f1 = interval_refinement(intervals, space, lam1)
    nonempty = all(iv is not None for iv in f1)
    report["iterate_nonempty"] = [True, nonempty]
    if not nonempty:
        bad = next(i for i, iv in enumerate(f1) if iv is None)
        report.update(status="refinement-empty", cert_valid=False, max_ratio=float("inf"),
                      ratio_quotient=float("inf"), stabilization_ok=False,
                      stabilization_defect=float("inf"), selection_seminorm=None,
                      selection_contained=None, witness={"empty_at": space.labels[bad]})
        report["wall_time"] = time.perf_counter() - t0
        return report
    ok, ratio = interval_core_check(f1, space, gamma)
    report["cert_valid"] = ok
    report["max_ratio"] = ratio
    report["ratio_quotient"] = ratio / gamma if gamma else float("inf")
    report["subset_containment"] = all(
        f.lo >= iv.lo - 1e-12 and f.hi <= iv.hi + 1e-12
        for f, iv in zip(f1, intervals))
    f2 = interval_refinement(f1, space, gamma)
    defect = max((interval_hausdorff(a, b) if b is not None else float("inf"))
                 for a, b in zip(f1, f2))
    report["stabilization_ok"] = defect <= 1e-9
    report["stabilization_defect"] = defect
    mids = np.array([(iv.lo + iv.hi) / 2.0 for iv in f1])
    worst = 0.0
    for i in range(space.n):
        for j in range(i + 1, space.n):
            rho = space.d[i, j]
            if not np.isfinite(rho):
                continue
            gap = abs(mids[i] - mids[j])
            if rho == 0:
                worst = float("inf") if gap > 1e-9 else worst
            else:
                worst = max(worst, gap / rho)
    report["selection_seminorm"] = worst
    report["selection_contained"] = True
    report["wall_time"] = time.perf_counter() - t0
    return report


def run_instance(data, with_hypothesis=False):
    """Pipeline for a parsed instance file; rates and gamma come from the
    file unless the caller overrode them there beforehand."""
    if data.lambdas is None or data.gamma is None:
        raise MalformedInputError("instance carries no rates/gamma and none were given")
    preset = PRESETS.get(data.preset) if data.preset else None
    slack = 1.0
    if data.kind == "planar" and data.norm.kind == "euclidean" and (
            preset is None or preset.fold_distortion):
        slack = data.norm.distortion()
    if data.kind == "intervals":
        report = run_intervals(data.intervals, data.space, data.lambdas[0], data.gamma)
    else:
        report = run_planar(data.to_map(), data.lambdas, data.gamma, slack_factor=slack,
                            with_hypothesis=with_hypothesis)
    report["preset"] = data.preset
    report["seed"] = data.seed
    return report


def _run_one(task):
    preset_name, n, seed, with_hypothesis = task
    try:
        data = build_instance(preset_name, n, seed)
        report = run_instance(data, with_hypothesis=with_hypothesis)
    except CorefineError as exc:
        report = {"preset": preset_name, "seed": seed, "n": n, "status": "error",
                  "error": str(exc), "cert_valid": False}
    return report


def batch_run(config):
    """Run a presets-by-seeds batch.

    config = {"runs": [{"preset": ..., "n": ..., "seeds": [...]}, ...],
              "with_hypothesis": bool}. Worker count comes from the
    COREFINE_THREADS environment variable (default 1); reports keep the
    run order regardless of workers, and failures are recorded per row.
    """
    tasks = []
    with_hyp = bool(config.get("with_hypothesis", False))
    for run in config.get("runs", []):
        preset_name = run["preset"]
        if preset_name not in PRESETS:
            raise MalformedInputError(f"unknown preset {preset_name!r}")
        seeds = run.get("seeds")
        if seeds is None:
            seeds = [int(run.get("seed", 0))]
        for seed in seeds:
            tasks.append((preset_name, int(run["n"]), int(seed), with_hyp))
    workers = int(os.environ.get(THREADS_ENV, "1"))
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_one, tasks))
    return [_run_one(t) for t in tasks]


CSV_COLUMNS = [
    "preset", "seed", "n", "kind", "norm", "lambda1", "lambda2", "gamma",
    "hypothesis", "cert_valid", "max_ratio", "ratio_quotient",
    "stabilization_ok", "stabilization_defect",
    "selection_seminorm", "selection_contained", "status", "wall_time",
]


def reports_to_csv(reports, fh):
    writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, extrasaction="ignore")
    writer.writeheader()
    for row in reports:
        writer.writerow({k: row.get(k) for k in CSV_COLUMNS})

"""Command-line interface.

Subcommands: gen, check-hypothesis, refine, certify, select, theorems,
report. Exit codes: 0 success / all checks pass, 1 a check failed, 2
malformed input, 3 an LP verdict was indeterminate.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import instancefile, sweeps
from .errors import CorefineError, IndeterminateError, MalformedInputError
from .lowdim import interval_refinement
from .metricspace import validate
from .refine import RefinementSchedule, iterate
from .runner import PRESETS, build_instance, run_instance
from .selection import steiner_selection
from .verify import check_hypothesis

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_MALFORMED = 2
EXIT_INDETERMINATE = 3


def _parse_lambdas(text):
    try:
        values = tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise MalformedInputError(f"bad --lambdas value {text!r}") from exc
    if not values:
        raise MalformedInputError("--lambdas needs at least one rate")
    return values


def _load_instance(path, force_invalid_metric=False):
    data = instancefile.load(path)
    report = validate(data.space)
    if not report.ok and not force_invalid_metric:
        raise MalformedInputError(
            f"instance metric is not a pseudometric ({report.reason} at {report.witness}); "
            "pass --force-invalid-metric to proceed anyway")
    return data


def _write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=float)
        fh.write("\n")


def cmd_gen(args):
    if args.preset not in PRESETS:
        raise MalformedInputError(f"unknown preset {args.preset!r}")
    norm = None
    if args.norm:
        cfg = {"kind": args.norm}
        if args.ngon:
            cfg["ngon"] = args.ngon
        from .geometry import PolygonalNorm

        norm = PolygonalNorm.from_config(cfg)
    outputs = []
    for k in range(args.count):
        seed = args.seed + k
        data = build_instance(args.preset, args.n, seed, norm=norm)
        if args.count == 1 and args.out:
            path = Path(args.out)
        else:
            stem = f"{args.preset}-n{args.n}-s{seed}.json"
            path = (Path(args.out) if args.out else Path.cwd()) / stem
            path.parent.mkdir(parents=True, exist_ok=True)
        instancefile.save(data, path)
        outputs.append(str(path))
    for p in outputs:
        print(p)
    return EXIT_OK


def cmd_check_hypothesis(args):
    data = _load_instance(args.instance, args.force_invalid_metric)
    if data.kind == "intervals":
        from .lowdim import interval_pair_feasible

        ok = all(interval_pair_feasible(data.intervals[i], data.intervals[j],
                                        data.space.d[i, j], args.bound)
                 for i in range(data.space.n) for j in range(i + 1, data.space.n))
        print(f"hypothesis: {'ok' if ok else 'fails'} (pairwise, bound {args.bound})")
        return EXIT_OK if ok else EXIT_FAIL
    res = check_hypothesis(data.to_map(), args.max_subset, args.bound)
    if res.indeterminate:
        print("hypothesis: indeterminate LP verdict", file=sys.stderr)
        return EXIT_INDETERMINATE
    if res.ok:
        print(f"hypothesis: ok (subsets up to {args.max_subset}, bound {args.bound})")
        return EXIT_OK
    labels = [data.space.labels[i] for i in res.failing_subset]
    print(f"hypothesis: fails on subset {labels}")
    return EXIT_FAIL


def cmd_refine(args):
    data = _load_instance(args.instance, args.force_invalid_metric)
    lambdas = _parse_lambdas(args.lambdas) if args.lambdas else data.lambdas
    if lambdas is None:
        raise MalformedInputError("no rates: pass --lambdas or embed them in the instance")
    labels = data.space.labels
    if data.kind == "intervals":
        levels = [{lab: [iv.lo, iv.hi] for lab, iv in zip(labels, data.intervals)}]
        current = data.intervals
        for lam in lambdas[:args.steps]:
            current = interval_refinement(current, data.space, lam)
            levels.append({lab: (None if iv is None else [iv.lo, iv.hi])
                           for lab, iv in zip(labels, current)})
    else:
        schedule = RefinementSchedule(lambdas, data.gamma or 1.0)
        chain = iterate(data.to_map(), schedule, min(args.steps, len(lambdas)))
        levels = [{lab: (None if b is None else b.vertices.tolist())
                   for lab, b in zip(labels, lvl.bodies)} for lvl in chain]
    payload = {"lambdas": list(lambdas), "iterates": levels}
    if args.out:
        _write_json(args.out, payload)
        print(args.out)
    else:
        json.dump(payload, sys.stdout, indent=2, sort_keys=True)
        print()
    return EXIT_OK


def cmd_certify(args):
    data = _load_instance(args.instance, args.force_invalid_metric)
    if args.lambdas:
        data.lambdas = _parse_lambdas(args.lambdas)
    if args.gamma is not None:
        data.gamma = args.gamma
    report = run_instance(data, with_hypothesis=args.check_hypothesis)
    certificate = {k: report.get(k) for k in
                   ("preset", "seed", "n", "gamma", "max_ratio", "ratio_quotient",
                    "cert_valid", "subset_containment", "iterate_nonempty",
                    "stabilization_ok", "stabilization_defect", "hypothesis",
                    "witness", "status", "wall_time")}
    if args.out:
        _write_json(args.out, certificate)
    if args.report:
        _write_json(args.report, report)
    verdict = "valid" if report.get("cert_valid") else "INVALID"
    print(f"certificate: {verdict} (gamma {report.get('gamma')}, "
          f"max ratio {report.get('max_ratio'):.6g})")
    if report.get("indeterminate"):
        return EXIT_INDETERMINATE
    return EXIT_OK if report.get("cert_valid") else EXIT_FAIL


def cmd_select(args):
    data = _load_instance(args.instance, args.force_invalid_metric)
    if args.lambdas:
        data.lambdas = _parse_lambdas(args.lambdas)
    if data.lambdas is None:
        raise MalformedInputError("no rates: pass --lambdas or embed them in the instance")
    if data.kind == "intervals":
        current = data.intervals
        for lam in data.lambdas[:1]:
            current = interval_refinement(current, data.space, lam)
        if any(iv is None for iv in current):
            print("selection failed: refinement is empty", file=sys.stderr)
            return EXIT_FAIL
        payload = {"selection": {lab: (iv.lo + iv.hi) / 2.0
                                 for lab, iv in zip(data.space.labels, current)}}
        from .selection import lipschitz_seminorm  # 1D midpoints measured on the line
        import numpy as np

        mids = np.array([[(iv.lo + iv.hi) / 2.0, 0.0] for iv in current])
        from .geometry import PolygonalNorm

        payload["seminorm"] = lipschitz_seminorm(mids, data.space, PolygonalNorm.linf())
    else:
        schedule = RefinementSchedule(data.lambdas, data.gamma or 1.0)
        chain = iterate(data.to_map(), schedule, min(2, len(data.lambdas)))
        if not chain[-1].nonempty_everywhere():
            bad = chain[-1].empty_points()[0]
            print(f"selection failed: refinement empty at {data.space.labels[bad]!r}",
                  file=sys.stderr)
            return EXIT_FAIL
        sel = steiner_selection(chain[-1])
        payload = {"selection": sel.as_dict(data.space), "seminorm": sel.seminorm}
    if args.out:
        _write_json(args.out, payload)
        print(args.out)
    else:
        json.dump(payload, sys.stdout, indent=2, sort_keys=True)
        print()
    return EXIT_OK


SUITES = ("ns", "triples", "squareness", "helly", "lowdim", "all")


def cmd_theorems(args):
    if args.suite not in SUITES:
        raise MalformedInputError(f"unknown suite {args.suite!r}")
    todo = SUITES[:-1] if args.suite == "all" else (args.suite,)
    all_ok = True
    for suite in todo:
        if suite == "ns":
            ok, det = sweeps.neighborhood_sweep(args.trials, args.seed, tol=args.tolerance)
        elif suite == "triples":
            ok, det = sweeps.triple_inclusion_sweep(args.trials, args.seed, tol=args.tolerance)
        elif suite == "squareness":
            ok, det = sweeps.squareness_sweep(max(args.trials * 100, 10_000), args.seed)
            det = {"rows": len(det["rows"]), "xi_at_zero": det["xi_at_zero"]}
        elif suite == "helly":
            ok, det = sweeps.helly_sweep(max(args.trials // 2, 50), args.seed, tol=args.tolerance)
            ok2, det2 = sweeps.segment_helly_sweep(args.trials, args.seed)
            ok = ok and ok2
            det = {**det, **det2}
        elif suite == "lowdim":
            ok, det = sweeps.lowdim_sweep(args.trials, args.seed)
        print(f"{suite}: {'PASS' if ok else 'FAIL'} {det}")
        all_ok = all_ok and ok
    return EXIT_OK if all_ok else EXIT_FAIL


def cmd_report(args):
    from .runner import reports_to_csv

    rows = []
    for path in args.inputs:
        with open(path) as fh:
            doc = json.load(fh)
        if isinstance(doc, list):
            rows.extend(doc)
        else:
            rows.append(doc)
    with open(args.out, "w", newline="") as fh:
        reports_to_csv(rows, fh)
    print(args.out)
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="corefine",
                                description="Iterated balanced refinements of set-valued "
                                            "maps: core certificates, selections, and "
                                            "convex-geometry property sweeps.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate instance files")
    g.add_argument("--preset", default="linf", help=f"one of {', '.join(PRESETS)}")
    g.add_argument("--n", type=int, default=12)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--norm", choices=["linf", "l1", "euclidean"], default=None,
                   help="override the preset norm")
    g.add_argument("--ngon", type=int, default=None, help="euclidean surrogate vertex count")
    g.add_argument("--out", default=None, help="output file (count=1) or directory")
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("check-hypothesis", help="finite-subset selection hypothesis")
    c.add_argument("instance")
    c.add_argument("--bound", type=float, default=1.0)
    c.add_argument("--max-subset", type=int, default=4)
    c.add_argument("--force-invalid-metric", action="store_true")
    c.set_defaults(func=cmd_check_hypothesis)

    r = sub.add_parser("refine", help="write refinement iterates")
    r.add_argument("instance")
    r.add_argument("--lambdas", default=None, help="comma-separated rates, e.g. 1,3")
    r.add_argument("--steps", type=int, default=2)
    r.add_argument("--out", default=None)
    r.add_argument("--force-invalid-metric", action="store_true")
    r.set_defaults(func=cmd_refine)

    ce = sub.add_parser("certify", help="refine twice and certify the core constant")
    ce.add_argument("instance")
    ce.add_argument("--lambdas", default=None)
    ce.add_argument("--gamma", type=float, default=None)
    ce.add_argument("--check-hypothesis", action="store_true")
    ce.add_argument("--out", default=None, help="certificate JSON path")
    ce.add_argument("--report", default=None, help="full report JSON path")
    ce.add_argument("--force-invalid-metric", action="store_true")
    ce.set_defaults(func=cmd_certify)

    se = sub.add_parser("select", help="Steiner selection of the second refinement")
    se.add_argument("instance")
    se.add_argument("--lambdas", default=None)
    se.add_argument("--out", default=None)
    se.add_argument("--force-invalid-metric", action="store_true")
    se.set_defaults(func=cmd_select)

    t = sub.add_parser("theorems", help="randomized property sweeps")
    t.add_argument("--suite", default="all", help=f"one of {', '.join(SUITES)}")
    t.add_argument("--trials", type=int, default=500)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--tolerance", type=float, default=None)
    t.set_defaults(func=cmd_theorems)

    rep = sub.add_parser("report", help="aggregate report JSON files to CSV")
    rep.add_argument("out", help="CSV output path")
    rep.add_argument("inputs", nargs="+", help="report JSON files")
    rep.set_defaults(func=cmd_report)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except IndeterminateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INDETERMINATE
    except (MalformedInputError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except CorefineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())

import numpy as np
import pytest

from corefine import MalformedInputError, check_hypothesis, validate
from corefine.generators import (
    GeneratorConfig,
    adversarial_instance,
    hidden_selection_instance,
    interval_instance,
    segment_instance,
    with_seed,
)
from corefine.instancefile import InstanceData, dumps
from gridoracle import grid_feasible, snap_slack


def test_config_validation():
    with pytest.raises(MalformedInputError):
        GeneratorConfig(n=0)
    with pytest.raises(MalformedInputError):
        GeneratorConfig(n=3, metric="nope")


def test_single_point_instance():
    F, plant = hidden_selection_instance(GeneratorConfig(n=1, seed=0))
    assert F.space.n == 1 and F.bodies[0] is not None
    assert plant.seminorm == 0.0


def test_determinism_bit_identical():
    for metric in ("tree", "random", "euclidean"):
        cfg = GeneratorConfig(n=9, metric=metric, seed=123)
        F1, p1 = hidden_selection_instance(cfg)
        F2, p2 = hidden_selection_instance(cfg)
        d1 = dumps(InstanceData("planar", F1.space, norm=F1.norm, bodies=F1.bodies,
                                selection=p1.points, seed=cfg.seed))
        d2 = dumps(InstanceData("planar", F2.space, norm=F2.norm, bodies=F2.bodies,
                                selection=p2.points, seed=cfg.seed))
        assert d1 == d2
        F3, _ = hidden_selection_instance(with_seed(cfg, 124))
        assert dumps(InstanceData("planar", F3.space, norm=F3.norm, bodies=F3.bodies)) != d1


def test_hidden_instances_satisfy_contract():
    for seed in range(12):
        metric = ("tree", "random", "euclidean")[seed % 3]
        cfg = GeneratorConfig(n=7, metric=metric, seed=seed)
        F, plant = hidden_selection_instance(cfg)
        assert validate(F.space).ok
        assert plant.seminorm <= 1.0 + 1e-7
        assert check_hypothesis(F, 4, 1.0).ok


def test_segment_instances_dim_and_hypothesis():
    for seed in range(8):
        cfg = GeneratorConfig(n=6, metric="tree" if seed % 2 else "random", seed=seed)
        F, plant = segment_instance(cfg)
        assert F.max_dim() <= 1
        assert plant.seminorm <= 1.0 + 1e-7
        assert check_hypothesis(F, 4, 1.0).ok


def test_interval_instances_plant_is_lipschitz():
    for seed in range(8):
        intervals, sp, g = interval_instance(GeneratorConfig(n=8, seed=seed))
        assert validate(sp).ok
        d = sp.d
        for i in range(sp.n):
            for j in range(i + 1, sp.n):
                if np.isfinite(d[i, j]) and d[i, j] > 0:
                    assert abs(g[i] - g[j]) <= d[i, j] * (1 + 1e-12)
                assert intervals[i].lo <= g[i] <= intervals[i].hi


def test_adversarial_far_singletons_verdict_false():
    cfg = GeneratorConfig(n=2, metric="random", seed=7, point_prob=1.0, segment_prob=0.0,
                          spread=40.0)
    F, verdict = adversarial_instance(cfg)
    assert not verdict.ok  # far singletons under a modest metric cannot bridge


def test_adversarial_equal_bodies_verdict_true():
    cfg = GeneratorConfig(n=5, metric="tree", seed=3, spread=0.0)
    F, verdict = adversarial_instance(cfg)
    # spread 0 pins every center to the origin: constant selection exists
    assert verdict.ok


def test_adversarial_verdict_matches_grid_oracle():
    hits = {True: 0, False: 0}
    for seed in range(14):
        cfg = GeneratorConfig(n=4, metric="random", seed=seed, body_scale=0.8,
                              spread=1.6, point_prob=0.0, segment_prob=0.0, max_vertices=5)
        F, verdict = adversarial_instance(cfg)
        slack = snap_slack(F.norm, 0.05)
        if verdict.ok:
            assert grid_feasible(F.bodies, F.space.d, 1.0, F.norm, 0.05, extra_slack=slack)
        else:
            assert not grid_feasible(F.bodies, F.space.d, 1.0, F.norm, 0.05, extra_slack=-1e-9)
        hits[verdict.ok] += 1
    assert hits[True] and hits[False]  # both outcomes exercised

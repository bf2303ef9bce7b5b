import numpy as np
import pytest

from corefine import (
    ConvexBody,
    GeometryError,
    Interval,
    MalformedInputError,
    PolygonalNorm,
    PseudometricSpace,
    SetValuedMap,
    balanced_refinement,
    interval_core_check,
    interval_refinement,
    point_body,
    segment_instance_adapter,
)
from corefine.generators import GeneratorConfig, interval_instance, segment_instance
from corefine.geometry import box_body
from corefine.lowdim import embed_intervals, extract_intervals, interval_hausdorff, interval_pair_feasible

LINF = PolygonalNorm.linf()


def _iv(lo, hi):
    return Interval(float(lo), float(hi))


def test_interval_validation():
    with pytest.raises(GeometryError):
        Interval(2.0, 1.0)


def test_refinement_already_covering():
    sp = PseudometricSpace([[0, 1], [1, 0]])
    f1 = interval_refinement([_iv(0, 2), _iv(1, 3)], sp, 1.0)
    assert f1[0] == _iv(0, 2) and f1[1] == _iv(1, 3)


def test_refinement_empty_when_far():
    sp = PseudometricSpace([[0, 1], [1, 0]])
    f1 = interval_refinement([_iv(0, 1), _iv(10, 11)], sp, 1.0)
    assert f1[0] is None and f1[1] is None


def test_refinement_singleton_space():
    sp = PseudometricSpace([[0.0]])
    assert interval_refinement([_iv(2, 5)], sp, 1.0) == [_iv(2, 5)]


def test_refinement_skips_infinite_distance():
    sp = PseudometricSpace([[0, np.inf], [np.inf, 0]])
    f1 = interval_refinement([_iv(0, 1), _iv(10, 11)], sp, 1.0)
    assert f1 == [_iv(0, 1), _iv(10, 11)]


def test_core_check_examples():
    sp = PseudometricSpace([[0, 1], [1, 0]])
    ok, ratio = interval_core_check([_iv(0, 2), _iv(1, 3)], sp, 1.0)
    assert ok and ratio == pytest.approx(1.0)
    ok, ratio = interval_core_check([_iv(5, 6), _iv(5, 6)], sp, 1.0)
    assert ok and ratio == 0.0
    assert interval_hausdorff(_iv(0, 2), _iv(1, 3)) == 1.0


def test_interval_pair_feasible():
    assert interval_pair_feasible(_iv(0, 1), _iv(1.5, 2), 1.0, 1.0)
    assert not interval_pair_feasible(_iv(0, 1), _iv(3, 4), 1.0, 1.0)
    assert interval_pair_feasible(_iv(0, 1), _iv(50, 60), np.inf, 1.0)


def test_inflation_distributes_over_intersection_closed_form():
    # with a common point, inflating the intersection = intersecting inflations
    rng = np.random.default_rng(0)
    for _ in range(300):
        k = int(rng.integers(2, 7))
        anchor = rng.uniform(-2, 2)
        los = anchor - rng.uniform(0, 2, k)
        his = anchor + rng.uniform(0, 2, k)
        r = float(rng.uniform(0, 1.5))
        lhs = (los.max() - r, his.min() + r)
        rhs = ((los - r).max(), (his + r).min())
        assert lhs == rhs


def test_hidden_interval_instances_certify_at_one():
    for seed in range(20):
        cfg = GeneratorConfig(n=10, metric="tree" if seed % 2 else "random", seed=seed)
        intervals, sp, g = interval_instance(cfg)
        f1 = interval_refinement(intervals, sp, 1.0)
        assert all(iv is not None for iv in f1)
        ok, ratio = interval_core_check(f1, sp, 1.0)
        assert ok and ratio <= 1.0 + 1e-12
        # second pass at gamma stabilizes
        f2 = interval_refinement(f1, sp, 1.0)
        assert all(interval_hausdorff(a, b) <= 1e-12 for a, b in zip(f1, f2))


def test_embedding_cross_validates_planar_engine():
    for seed in range(8):
        cfg = GeneratorConfig(n=9, metric="random", seed=seed)
        intervals, sp, _ = interval_instance(cfg)
        closed = interval_refinement(intervals, sp, 1.0)
        planar = extract_intervals(balanced_refinement(embed_intervals(intervals, sp), 1.0))
        for a, b in zip(closed, planar):
            assert abs(a.lo - b.lo) <= 1e-7 and abs(a.hi - b.hi) <= 1e-7


def test_adapter_accepts_segments_rejects_polygons():
    cfg = GeneratorConfig(n=6, metric="tree", seed=1)
    F, _ = segment_instance(cfg)
    assert segment_instance_adapter(F) is F
    sp = PseudometricSpace([[0, 1], [1, 0]], ["x", "y"])
    all_points = SetValuedMap(sp, LINF, [point_body([0, 0]), point_body([1, 0])])
    assert segment_instance_adapter(all_points) is all_points
    bad = SetValuedMap(sp, LINF, [point_body([0, 0]), box_body(0, 1, 0, 1)])
    with pytest.raises(MalformedInputError) as err:
        segment_instance_adapter(bad)
    assert "'y'" in str(err.value)


def test_extract_rejects_off_axis():
    sp = PseudometricSpace([[0.0]])
    F = SetValuedMap(sp, LINF, [ConvexBody([[0, 1], [2, 1]])])
    with pytest.raises(GeometryError):
        extract_intervals(F)

import math

import numpy as np
import pytest

from corefine import (
    ConvexBody,
    MalformedInputError,
    PolygonalNorm,
    PreconditionError,
    PseudometricSpace,
    SetValuedMap,
    ball_body,
    certify_core,
    check_hypothesis,
    check_neighborhood_inclusion,
    check_triple_inclusion,
    modulus_of_squareness,
    neighborhood_counterexample_depth,
    neighborhood_inflation,
    phi_bound,
    point_body,
    psi_euclidean,
    subset_feasible,
)
from corefine.generators import GeneratorConfig, adversarial_instance, hidden_selection_instance
from corefine.geometry import box_body
from corefine.verify import shifted_counterexample_body
from gridoracle import grid_feasible, snap_slack

LINF = PolygonalNorm.linf()
EUC = PolygonalNorm.euclidean(64)


# --------------------------------------------------------- subset feasibility


def test_singleton_subset_feasible():
    res = subset_feasible([box_body(0, 1, 0, 1)], [[0.0]], 1.0, LINF)
    assert res.feasible and res.witness is not None


def test_pair_bridgeable_and_not():
    bodies = [box_body(0, 1, 0, 1), box_body(3, 4, 3, 4)]
    res = subset_feasible(bodies, [[0, 3], [3, 0]], 1.0, LINF)
    assert res.feasible
    p, q = res.witness
    assert LINF.gauge(p - q) <= 3.0 + 1e-7
    # slack spreads uniformly over membership and pair rows: (2 - 1) / 3
    res = subset_feasible(bodies, [[0, 1], [1, 0]], 1.0, LINF)
    assert not res.feasible and res.slack == pytest.approx(1 / 3)


def test_infinite_distance_pair_unconstrained():
    bodies = [point_body([0, 0]), point_body([50, 0])]
    res = subset_feasible(bodies, [[0, np.inf], [np.inf, 0]], 1.0, LINF)
    assert res.feasible


def test_subset_feasible_agrees_with_grid_oracle_smoke():
    rng = np.random.default_rng(0)
    res_grid = 0.05
    for trial in range(20):
        cfg = GeneratorConfig(n=4, metric="random", seed=trial, body_scale=0.8, spread=1.0,
                              point_prob=0.0, segment_prob=0.2, max_vertices=5)
        F, _ = (hidden_selection_instance if trial % 2 else adversarial_instance)(cfg)
        if isinstance(F, tuple):
            F = F[0]
        bound = float(rng.uniform(0.4, 1.4))
        lp = subset_feasible(F.bodies, F.space.d, bound, F.norm)
        slack = snap_slack(F.norm, res_grid)
        if lp.feasible:
            assert grid_feasible(F.bodies, F.space.d, bound, F.norm, res_grid, extra_slack=slack)
        if grid_feasible(F.bodies, F.space.d, bound, F.norm, res_grid, extra_slack=-1e-9):
            assert lp.feasible


# ------------------------------------------------------------ check_hypothesis


def test_hypothesis_hidden_instance_true():
    F, _ = hidden_selection_instance(GeneratorConfig(n=7, metric="tree", seed=5))
    assert check_hypothesis(F, 4, 1.0).ok


def test_hypothesis_far_singletons_false():
    sp = PseudometricSpace([[0, 1], [1, 0]], ["x", "y"])
    F = SetValuedMap(sp, LINF, [point_body([0, 0]), point_body([5, 0])])
    res = check_hypothesis(F, 4, 1.0)
    assert not res.ok and res.failing_subset == (0, 1)


def test_hypothesis_rejects_bad_args():
    F, _ = hidden_selection_instance(GeneratorConfig(n=3, seed=0))
    with pytest.raises(MalformedInputError):
        check_hypothesis(F, 0, 1.0)


# ---------------------------------------------------------------- certify_core


def test_certify_identity_constant():
    sp = PseudometricSpace([[0, 1], [1, 0]])
    K = box_body(0, 2, 0, 2)
    F = SetValuedMap(sp, LINF, [K, K])
    cert = certify_core(F, F, 1e-9)
    assert cert.valid and cert.max_ratio == 0


def test_certify_measures_planted_ratio():
    sp = PseudometricSpace([[0, 1], [1, 0]], ["x", "y"])
    F = SetValuedMap(sp, LINF, [box_body(-5, 5, -5, 5), box_body(-5, 5, -5, 5)])
    h = 2.75
    G = SetValuedMap(sp, LINF, [point_body([0, 0]), point_body([h, 0])])
    cert = certify_core(F, G, 10.0)
    assert cert.valid
    assert cert.max_ratio == pytest.approx(h)
    tight = certify_core(F, G, h - 0.5)
    assert not tight.valid and tight.witness["worst_pair"] == ("x", "y")


def test_certify_flags_containment_failure():
    sp = PseudometricSpace([[0, 1], [1, 0]])
    F = SetValuedMap(sp, LINF, [box_body(0, 1, 0, 1), box_body(0, 1, 0, 1)])
    G = SetValuedMap(sp, LINF, [box_body(0, 3, 0, 3), box_body(0, 1, 0, 1)])
    cert = certify_core(F, G, 100.0)
    assert not cert.valid and not cert.subset_containment


def test_certify_flags_empty():
    sp = PseudometricSpace([[0, 1], [1, 0]], ["x", "y"])
    F = SetValuedMap(sp, LINF, [box_body(0, 1, 0, 1), box_body(0, 1, 0, 1)])
    G = SetValuedMap(sp, LINF, [box_body(0, 1, 0, 1), None])
    cert = certify_core(F, G, 100.0)
    assert not cert.valid and not cert.nonempty and cert.witness == {"empty_at": "y"}


def test_certify_zero_distance_pair():
    sp = PseudometricSpace([[0, 0], [0, 0]])
    F = SetValuedMap(sp, LINF, [box_body(0, 2, 0, 2), box_body(0, 2, 0, 2)])
    G_same = SetValuedMap(sp, LINF, [box_body(0, 1, 0, 1), box_body(0, 1, 0, 1)])
    assert certify_core(F, G_same, 5.0).valid
    G_diff = SetValuedMap(sp, LINF, [box_body(0, 1, 0, 1), box_body(0, 2, 0, 2)])
    cert = certify_core(F, G_diff, 5.0)
    assert not cert.valid and cert.max_ratio == np.inf


# ------------------------------------------------- neighborhood inclusion


def test_neighborhood_inflation_values():
    assert neighborhood_inflation(3.0) == 5.0
    assert neighborhood_inflation(2.0) == 7.0
    assert neighborhood_inflation(3.0, euclidean=True) == pytest.approx(1 + 6 / math.sqrt(8))


def test_neighborhood_inclusion_box_example():
    ok, margin = check_neighborhood_inclusion(box_body(0, 10, 0, 10), [0, 0], 1.0, 0.5, 3.0, LINF)
    assert ok and margin == 0.0


def test_neighborhood_inclusion_r_zero_trivial():
    ok, _ = check_neighborhood_inclusion(box_body(0, 10, 0, 10), [1, 1], 0.0, 0.5, 3.0, LINF)
    assert ok


def test_neighborhood_inclusion_euclidean_theta():
    ok, _ = check_neighborhood_inclusion(box_body(0, 10, 0, 10), [0, 0], 1.0, 0.5, 3.0,
                                         EUC, euclidean_theta=True)
    assert ok


def test_neighborhood_precondition_enforced():
    with pytest.raises(PreconditionError):
        check_neighborhood_inclusion(box_body(5, 6, 5, 6), [0, 0], 1.0, 0.5, 3.0, LINF)


def test_counterexample_depth_positive_and_growing():
    d10 = neighborhood_counterexample_depth(10)
    d100 = neighborhood_counterexample_depth(100)
    assert d10 > 0
    assert d100 > d10
    with pytest.raises(MalformedInputError):
        neighborhood_counterexample_depth(5)


def test_shifted_counterexample_satisfies_inclusion():
    C, a, r, s, norm = shifted_counterexample_body(10)
    ok, margin = check_neighborhood_inclusion(C, a, r, s, 2.0, norm)
    assert ok and margin == 0.0


# --------------------------------------------------------- triple inclusion


def test_triple_inclusion_nested_example():
    K = box_body(0, 2, 0, 2)
    ok, margin = check_triple_inclusion(K, K, K, 1.0, 3.0, 0.1, LINF)
    assert ok and margin == 0.0


def test_triple_inclusion_precondition():
    with pytest.raises(PreconditionError):
        check_triple_inclusion(box_body(40, 41, 40, 41), box_body(0, 1, 0, 1),
                               box_body(0, 1, 0, 1), 0.5, 3.0, 0.1, LINF)


def test_triple_inclusion_segment_variant():
    seg = ConvexBody([[0, 0], [2, 0]])
    ok, _ = check_triple_inclusion(box_body(0, 2, 0, 2), seg, box_body(-1, 1, -1, 1),
                                   0.5, 3.0, 0.2, LINF)
    assert ok


# ------------------------------------------------------ modulus of squareness


def test_squareness_beta_zero_is_one():
    for norm in (LINF, EUC):
        xi = modulus_of_squareness(norm, 0.0, 20_000, rng=0)
        assert xi == pytest.approx(1.0, abs=1e-9)


def test_squareness_euclidean_converges_to_closed_form():
    xi = modulus_of_squareness(EUC, 0.6, 100_000, rng=0)
    assert 0.98 * 1.25 <= xi <= 1.25 + 1e-9
    assert psi_euclidean(0.6) == 1.25


def test_squareness_universal_bound():
    assert phi_bound(0.5) == 3.0
    for norm in (LINF, PolygonalNorm.l1()):
        xi = modulus_of_squareness(norm, 0.5, 50_000, rng=1)
        assert xi <= 3.0 + 1e-9


def test_squareness_rejects_bad_beta():
    with pytest.raises(MalformedInputError):
        modulus_of_squareness(LINF, 1.0, 1000)


def test_ball_body():
    b = ball_body(LINF, [1, 1], 2.0)
    assert b.same_as(box_body(-1, 3, -1, 3), 0)
    assert ball_body(LINF, [1, 1], 0.0).dim == 0

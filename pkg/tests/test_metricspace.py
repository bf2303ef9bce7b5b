import numpy as np
import pytest

from corefine import (
    MalformedInputError,
    PseudometricSpace,
    WeightedTree,
    metric_closure,
    scale,
    subsets_up_to,
    tree_metric,
    validate,
)


def test_validate_two_point():
    assert validate(PseudometricSpace([[0, 1], [1, 0]], ["x", "y"])).ok


def test_validate_triangle_violation():
    rep = validate(PseudometricSpace([[0, 5, 1], [5, 0, 1], [1, 1, 0]]))
    assert not rep.ok
    i, k, j = rep.witness
    assert {i, j} == {0, 1} and k == 2


def test_validate_all_zero():
    assert validate(PseudometricSpace(np.zeros((4, 4)))).ok


def test_validate_asymmetric_and_diagonal():
    rep = validate(PseudometricSpace([[0, 1], [2, 0]]))
    assert not rep.ok and rep.reason == "asymmetric entry"
    rep = validate(PseudometricSpace([[1, 1], [1, 0]]))
    assert not rep.ok and rep.reason == "nonzero diagonal"


def test_validate_infinite_entries():
    d = np.array([[0, np.inf], [np.inf, 0]])
    assert validate(PseudometricSpace(d)).ok
    # finite path through k makes an inf entry inconsistent
    d = np.array([[0, 1, np.inf], [1, 0, 1], [np.inf, 1, 0]])
    rep = validate(PseudometricSpace(d))
    assert not rep.ok


def test_malformed_matrix_rejected():
    with pytest.raises(MalformedInputError):
        PseudometricSpace([[0, 1, 2], [1, 0, 3]])
    with pytest.raises(MalformedInputError):
        PseudometricSpace([[0, -1], [-1, 0]])
    with pytest.raises(MalformedInputError):
        PseudometricSpace([[0, 1], [1, 0]], labels=["only-one"])


def test_scale():
    sp = PseudometricSpace([[0, 2], [2, 0]])
    assert np.array_equal(scale(sp, 1.0).d, sp.d)
    assert np.allclose(scale(sp, 4 / 3).d, [[0, 8 / 3], [8 / 3, 0]])
    spi = PseudometricSpace([[0, np.inf], [np.inf, 0]])
    assert np.isinf(scale(spi, 3.0).d[0, 1])
    with pytest.raises(MalformedInputError):
        scale(sp, 0.0)


def test_scale_composes():
    rng = np.random.default_rng(0)
    m = rng.uniform(0.1, 2, (5, 5))
    sp = PseudometricSpace(metric_closure((m + m.T) / 2 - np.diag(np.diag(m))))
    # power-of-two second factor keeps floating point exact
    assert np.array_equal(scale(scale(sp, 1.7), 4.0).d, scale(sp, 1.7 * 4.0).d)
    assert np.allclose(scale(scale(sp, 1.7), 2.3).d, scale(sp, 1.7 * 2.3).d, rtol=1e-15)


def test_tree_metric_examples():
    t = WeightedTree(3, [(0, 1, 1.0), (1, 2, 2.0)], ["x", "u", "y"])
    tm = tree_metric(t)
    assert tm.d[0, 2] == 3.0
    assert validate(tm).ok
    single = tree_metric(WeightedTree(1, []))
    assert single.d.shape == (1, 1) and single.d[0, 0] == 0
    star = tree_metric(WeightedTree(4, [(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)]))
    assert star.d[1, 2] == 2.0


def test_tree_rejects_disconnected_and_bad_weights():
    with pytest.raises(MalformedInputError):
        WeightedTree(4, [(0, 1, 1.0), (2, 3, 1.0)])  # two components, wrong edge count
    with pytest.raises(MalformedInputError):
        tree_metric(WeightedTree(3, [(0, 1, 1.0), (0, 1, 2.0)]))  # node 2 unreachable
    with pytest.raises(MalformedInputError):
        WeightedTree(2, [(0, 1, -1.0)])


def test_tree_metric_random_always_valid():
    rng = np.random.default_rng(1)
    for _ in range(25):
        n = int(rng.integers(2, 12))
        edges = [(int(rng.integers(0, i)), i, float(rng.uniform(0.1, 3))) for i in range(1, n)]
        assert validate(tree_metric(WeightedTree(n, edges))).ok


def test_subsets_counts():
    assert sum(1 for _ in subsets_up_to(4, 4)) == 15
    assert sum(1 for _ in subsets_up_to(5, 2)) == 15
    assert list(subsets_up_to(1, 1)) == [(0,)]
    seen = list(subsets_up_to(5, 3))
    assert len(seen) == len(set(seen))
    with pytest.raises(MalformedInputError):
        list(subsets_up_to(3, 0))


def test_validate_catches_planted_asymmetry():
    rng = np.random.default_rng(2)
    for _ in range(30):
        n = int(rng.integers(3, 10))
        m = rng.uniform(0.5, 2, (n, n))
        d = metric_closure((m + m.T) / 2 - np.diag(np.diag(m)))
        d = np.abs(d)
        np.fill_diagonal(d, 0)
        i, j = rng.integers(0, n, 2)
        while i == j:
            j = rng.integers(0, n)
        d[i, j] += 0.5  # breaks symmetry
        assert not validate(PseudometricSpace(d)).ok

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from streamguard.learners import (
    HoeffdingAdaptiveTree,
    HoeffdingTree,
    HoeffdingTreeParams,
    hoeffding_bound,
)

from conftest import make_feature_stream


def test_hoeffding_bound_pinned_value():
    # sqrt(1 * ln(20) / 100)
    assert hoeffding_bound(1.0, 0.05, 50) == pytest.approx(0.17308, abs=1e-4)


def test_hoeffding_bound_grid_matches_closed_form():
    for r in (0.5, 1.0, 2.0):
        for delta in (0.05, 0.01, 1e-7):
            for n in (1, 50, 1000):
                expected = math.sqrt(r * r * math.log(1.0 / delta) / (2.0 * n))
                assert abs(hoeffding_bound(r, delta, n) - expected) < 1e-12


def test_hoeffding_bound_monotone_and_zero_range():
    prev = hoeffding_bound(1.0, 0.05, 10)
    for n in (20, 40, 80, 160):
        cur = hoeffding_bound(1.0, 0.05, n)
        assert cur < prev
        prev = cur
    assert hoeffding_bound(0.0, 0.05, 10) == 0.0


def test_invalid_bound_args():
    with pytest.raises(ValueError):
        hoeffding_bound(1.0, 0.05, 0)
    with pytest.raises(ValueError):
        hoeffding_bound(1.0, 1.5, 10)


def test_empty_tree_predicts_uniform():
    tree = HoeffdingTree(n_features=4)
    assert np.array_equal(tree.predict_proba(np.zeros(4)), [0.5, 0.5])


def test_laplace_smoothing_at_leaf():
    tree = HoeffdingTree(n_features=1, params=HoeffdingTreeParams(grace_period=1e9))
    for _ in range(9):
        tree.learn_one(np.array([0.0]), 1)
    tree.learn_one(np.array([0.0]), 0)
    p = tree.predict_proba(np.array([0.0]))
    assert p[0] == pytest.approx(2 / 12)
    assert p[1] == pytest.approx(10 / 12)


def test_separable_stream_splits_on_informative_feature():
    xs, ys = make_feature_stream(seed=3, n=500, n_features=6)
    tree = HoeffdingTree(n_features=6)
    correct_after_split = []
    for x, y in zip(xs, ys):
        if tree.n_splits > 0:
            correct_after_split.append(tree.predict(x) == y)
        tree.learn_one(x, int(y))
    assert tree.n_splits >= 1
    assert tree.root.feature == 0  # the separating feature
    assert np.mean(correct_after_split) >= 0.99


def test_constant_label_stream_never_splits():
    rng = np.random.default_rng(0)
    tree = HoeffdingTree(n_features=3)
    for _ in range(1000):
        tree.learn_one(rng.normal(size=3), 1)
    assert tree.n_splits == 0


def test_adaptive_tree_recovers_from_concept_flip():
    xs, ys = make_feature_stream(seed=5, n=5000, n_features=6, flip_at=3000)
    tree = HoeffdingAdaptiveTree(n_features=6)
    hits = []
    for x, y in zip(xs, ys):
        hits.append(tree.predict(x) == y)
        tree.learn_one(x, int(y))
    tail = hits[4500:5000]  # within 2000 samples of the flip
    assert np.mean(tail) >= 0.9


def test_max_depth_limits_growth():
    xs, ys = make_feature_stream(seed=7, n=3000, n_features=4)
    tree = HoeffdingTree(n_features=4, params=HoeffdingTreeParams(max_depth=1))
    for x, y in zip(xs, ys):
        tree.learn_one(x, int(y))

    def depth_of(node, d=0):
        if not hasattr(node, "feature"):
            return d
        return max(depth_of(node.left, d + 1), depth_of(node.right, d + 1))

    assert depth_of(tree.root) <= 1


def test_memory_bound_enforced():
    params = HoeffdingTreeParams(
        max_size_mb=0.05, grace_period=20.0, split_confidence=0.1, tie_threshold=0.5
    )
    tree = HoeffdingTree(n_features=16, params=params)
    rng = np.random.default_rng(2)
    # shifting separable concepts force continual splitting pressure
    for i in range(6000):
        x = rng.normal(size=16)
        y = int(x[i // 500 % 16] > 0)
        tree.learn_one(x, y)
    cap = params.max_size_mb * 1024 * 1024
    assert tree.estimate_size_bytes() <= cap
    assert tree.serialized_size_bytes() <= cap


def test_nan_routing_goes_to_heavier_child():
    tree = HoeffdingTree(n_features=2)
    xs, ys = make_feature_stream(seed=9, n=1500, n_features=2)
    for x, y in zip(xs, ys):
        tree.learn_one(x, int(y))
    assert tree.n_splits >= 1
    p = tree.predict_proba(np.array([np.nan, 0.3]))
    assert abs(p.sum() - 1.0) < 1e-12


@given(st.integers(0, 2**32 - 1), st.integers(5, 60))
@settings(max_examples=25, deadline=None)
def test_predictions_are_valid_distributions(seed, n):
    xs, ys = make_feature_stream(seed=seed, n=n, n_features=3)
    tree = HoeffdingTree(n_features=3, params=HoeffdingTreeParams(grace_period=10))
    for x, y in zip(xs, ys):
        p = tree.predict_proba(x)
        assert p.shape == (2,)
        assert (p >= 0).all() and (p <= 1).all()
        assert abs(p.sum() - 1.0) < 1e-9
        tree.learn_one(x, int(y))

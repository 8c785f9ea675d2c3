import numpy as np
import pytest

from streamguard.selection import (
    SelectionMask,
    VarianceTracker,
    mdi_importances,
    run_cold_start_selection,
    select_from_importances,
)


def planted_dataset(seed=0, n=600, n_noise=20):
    """Label is the indicator of one feature; the rest is noise."""
    rng = np.random.default_rng(seed)
    informative = rng.normal(size=n)
    labels = (informative > 0).astype(int)
    noise = rng.normal(size=(n, n_noise))
    matrix = np.column_stack([informative, noise])
    names = ["signal"] + [f"noise_{i:02d}" for i in range(n_noise)]
    return matrix, labels, names


def test_informative_feature_dominates():
    matrix, labels, names = planted_dataset()
    imp = mdi_importances(matrix, labels, names, seed=7)
    assert max(imp, key=imp.get) == "signal"
    assert imp["signal"] > 2 * max(v for k, v in imp.items() if k != "signal")


def test_importances_sum_to_one():
    matrix, labels, names = planted_dataset(seed=1)
    imp = mdi_importances(matrix, labels, names, seed=7)
    assert sum(imp.values()) == pytest.approx(1.0, abs=1e-9)


def test_deterministic_under_fixed_seed():
    matrix, labels, names = planted_dataset(seed=2)
    a = mdi_importances(matrix, labels, names, seed=13)
    b = mdi_importances(matrix, labels, names, seed=13)
    assert a == b


def test_duplicated_feature_shares_importance():
    matrix, labels, names = planted_dataset(seed=3, n_noise=6)
    solo = mdi_importances(matrix, labels, names, seed=5)["signal"]
    dup_matrix = np.column_stack([matrix, matrix[:, 0]])
    dup_names = names + ["signal_copy"]
    dup = mdi_importances(dup_matrix, labels, dup_names, seed=5)
    assert dup["signal"] < solo
    assert dup["signal_copy"] < solo
    assert dup["signal"] + dup["signal_copy"] == pytest.approx(solo, rel=0.25)


def test_single_class_buffer_rejected():
    matrix = np.random.default_rng(0).normal(size=(50, 3))
    labels = np.ones(50, dtype=int)
    with pytest.raises(ValueError, match="both classes"):
        mdi_importances(matrix, labels, ["a", "b", "c"])


def test_mean_rule_selection():
    uniform = {"a": 0.25, "b": 0.25, "c": 0.25, "d": 0.25}
    assert select_from_importances(uniform).active == frozenset("abcd")
    skewed = {"a": 0.7, "b": 0.2, "c": 0.1}
    mask = select_from_importances(skewed)
    assert mask.active == frozenset("a")
    assert mask.version == 1 and mask.stage == "cold_start"


def test_mean_rule_drops_most_noise_features():
    matrix, labels, names = planted_dataset(seed=4, n=800, n_noise=20)
    sel = run_cold_start_selection(matrix, labels, names, seed=11)
    assert "signal" in sel.mask.active
    dropped_noise = sum(1 for n in names[1:] if n not in sel.mask.active)
    assert dropped_noise >= 0.8 * 20


def _tracker(names=("f", "g")):
    cold = SelectionMask(active=frozenset(names), stage="cold_start", version=1)
    return VarianceTracker(list(names), cold)


def test_constant_feature_masked_once_judgeable():
    tr = _tracker()
    m1 = tr.update({"f": 0.0, "g": 1.0})
    assert "f" in m1.active  # one observation: not judged yet
    m2 = tr.update({"f": 0.0, "g": 2.0})
    assert "f" not in m2.active
    assert "g" in m2.active
    for _ in range(498):
        m = tr.update({"f": 0.0, "g": 2.0})
    assert "f" not in m.active


def test_feature_returns_when_variance_positive():
    tr = _tracker()
    for _ in range(500):
        tr.update({"f": 0.0, "g": float(np.random.default_rng(0).random())})
    assert "f" not in tr.mask.active
    version_before = tr.mask.version
    m = tr.update({"f": 1.0, "g": 0.5})
    assert "f" in m.active
    assert m.version == version_before + 1


def test_version_stable_when_membership_stable():
    tr = _tracker()
    rng = np.random.default_rng(1)
    tr.update({"f": rng.random(), "g": rng.random()})
    v = tr.mask.version
    for _ in range(50):
        m = tr.update({"f": rng.random(), "g": rng.random()})
    assert m.version == v  # all features varying: no membership change


def test_mask_version_strictly_increases_on_change():
    tr = _tracker(names=("f",))
    versions = [tr.mask.version]
    tr.update({"f": 0.0})
    versions.append(tr.mask.version)
    tr.update({"f": 0.0})  # drops out
    versions.append(tr.mask.version)
    tr.update({"f": 3.0})  # comes back
    versions.append(tr.mask.version)
    assert versions == sorted(versions)
    assert len(set(versions)) == 3  # unchanged, changed, changed


def test_mask_export_text():
    mask = SelectionMask(active=frozenset(["b", "a"]), stage="streaming", version=4)
    text = mask.to_text()
    assert "version\t4" in text
    assert text.index("feature\ta") < text.index("feature\tb")

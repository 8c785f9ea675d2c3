import math

import numpy as np
import pytest

from streamguard.learners import Adwin


def brute_force_first_detection(values, delta):
    """Independent oracle: full-resolution scan over every prefix cut of the
    growing window (no buckets), same confidence radius family."""
    window = []
    for t, v in enumerate(values):
        window.append(v)
        n = len(window)
        if n < 10:
            continue
        arr = np.asarray(window)
        total = arr.sum()
        var = arr.var()
        dd = math.log(2.0 * math.log(n) / delta)
        cum = np.cumsum(arr)
        n0 = np.arange(1, n)
        n1 = n - n0
        mask = (n0 >= 5) & (n1 >= 5)
        if not mask.any():
            continue
        mu0 = cum[:-1] / n0
        mu1 = (total - cum[:-1]) / n1
        m = 1.0 / n0 + 1.0 / n1
        eps = np.sqrt(2.0 * m * var * dd) + (2.0 / 3.0) * m * dd
        if (np.abs(mu0 - mu1) > eps)[mask].any():
            return t
    return None


def test_mean_shift_detected_quickly():
    values = [0.0] * 5000 + [1.0] * 5000
    det = Adwin(delta=0.002)
    detected_at = None
    for i, v in enumerate(values):
        if det.update(v):
            detected_at = i
            break
    assert detected_at is not None
    assert 5000 <= detected_at <= 5200

    oracle_t = brute_force_first_detection(values[:5300], 0.002)
    assert oracle_t is not None and 5000 <= oracle_t <= 5200
    # bucket compression may delay relative to the full-resolution oracle,
    # but only within the same post-shift neighbourhood
    assert abs(detected_at - oracle_t) <= 50


def test_constant_stream_never_drifts():
    det = Adwin(delta=0.002)
    assert not any(det.update(3.25) for _ in range(5000))


def test_stationary_bernoulli_false_alarms():
    rng = np.random.default_rng(42)
    det = Adwin(delta=0.002)
    alarms = sum(det.update(float(v)) for v in (rng.random(10_000) < 0.5))
    assert alarms <= 2


def test_window_shrinks_on_drift():
    det = Adwin(delta=0.002)
    for _ in range(2000):
        det.update(0.0)
    for i in range(500):
        if det.update(1.0):
            break
    # the pre-shift zeros were dropped at the cut
    assert det.width < 600
    for _ in range(200):
        det.update(1.0)
    # window now tracks the new regime
    assert det.mean > 0.9


def test_mean_and_width_track_inserts():
    det = Adwin(delta=0.002)
    vals = [1.0, 2.0, 3.0, 4.0]
    for v in vals:
        det.update(v)
    assert det.width == 4
    assert det.mean == pytest.approx(2.5)
    assert det.variance == pytest.approx(np.var(vals))


def test_invalid_delta_rejected():
    with pytest.raises(ValueError):
        Adwin(delta=0.0)
    with pytest.raises(ValueError):
        Adwin(delta=1.0)

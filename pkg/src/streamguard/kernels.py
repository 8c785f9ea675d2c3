"""Numeric kernels behind the incremental learners, in two backends.

The hot inner loops of the stream learners (per-leaf running-moment updates,
Gaussian log-likelihood sums, split-gain scans over candidate thresholds, and
the adaptive-window cut scan) are compiled with numba when available. A pure
numpy implementation of every kernel ships alongside and is selected by:

  * ``STREAMGUARD_NO_NUMBA=1`` in the environment, or
  * ``NUMBA_DISABLE_JIT=1`` (numba's own switch), or
  * numba failing to import.

Both backends are deterministic. Reduction order differs between them, so
results can differ in the last few ulps; replay guarantees therefore hold
per backend, not across backends. ``benchmarks/bench_kernels.py`` compares
the two.
"""

from __future__ import annotations

import math
import os

import numpy as np
from scipy.special import erf as _sp_erf

_LOG_2PI = math.log(2.0 * math.pi)
_SQRT2 = math.sqrt(2.0)

# ADWIN bucket geometry: rows of buckets, row ``l`` holds buckets of 2**l
# elements, at most ADWIN_ROW_CAP per row (one spare slot for compression).
ADWIN_LEVELS = 32
ADWIN_ROW_CAP = 5
_ADWIN_SLOTS = ADWIN_ROW_CAP + 1


def _numba_requested() -> bool:
    if os.environ.get("STREAMGUARD_NO_NUMBA", "").strip() in ("1", "true", "yes"):
        return False
    if os.environ.get("NUMBA_DISABLE_JIT", "").strip() in ("1", "true", "yes"):
        return False
    return True


# ---------------------------------------------------------------------------
# loop-style implementations (numba-compilable; also runnable as plain python)
# ---------------------------------------------------------------------------

def _welford_update_loop(ns, means, m2s, mins, maxs, x, w):
    """Weighted running-moment update for one observation vector.

    NaN entries in ``x`` mark missing values and leave that feature's
    accumulators untouched.
    """
    for f in range(x.shape[0]):
        v = x[f]
        if math.isnan(v):
            continue
        n = ns[f] + w
        delta = v - means[f]
        mean = means[f] + w * delta / n
        ns[f] = n
        means[f] = mean
        m2s[f] += w * delta * (v - mean)
        if v < mins[f]:
            mins[f] = v
        if v > maxs[f]:
            maxs[f] = v


def _gaussian_joint_loglik_loop(ns, means, m2s, x, var_floor, out):
    """Sum of per-feature Gaussian log densities for each class.

    A feature contributes only when it is observed in ``x`` and every class
    has at least one observation for it (symmetric skip, so a feature never
    biases one class merely by having been seen there).
    """
    n_classes = ns.shape[0]
    n_features = ns.shape[1]
    for c in range(n_classes):
        out[c] = 0.0
    for f in range(n_features):
        v = x[f]
        if math.isnan(v):
            continue
        ok = True
        for c in range(n_classes):
            if ns[c, f] < 1.0:
                ok = False
        if not ok:
            continue
        for c in range(n_classes):
            var = m2s[c, f] / ns[c, f]
            if var < var_floor:
                var = var_floor
            d = v - means[c, f]
            out[c] += -0.5 * (_LOG_2PI + math.log(var) + d * d / var)


def _split_gain_scan_loop(ns, means, m2s, mins, maxs, n_cand, var_floor,
                          gains, thresholds):
    """Best information gain and threshold per feature.

    Candidate thresholds are ``n_cand`` points evenly spaced strictly inside
    the observed [min, max] of the feature. Child masses follow the
    class-conditional Gaussian CDF of the leaf statistics. Entropies are in
    bits, so gains live in [0, 1] for the binary task.
    """
    n_features = ns.shape[1]
    for f in range(n_features):
        gains[f] = 0.0
        thresholds[f] = 0.0
        w0 = ns[0, f]
        w1 = ns[1, f]
        total = w0 + w1
        lo = mins[f]
        hi = maxs[f]
        if total <= 0.0 or not hi > lo:
            continue
        h0 = 0.0
        if w0 > 0.0:
            h0 -= (w0 / total) * math.log2(w0 / total)
        if w1 > 0.0:
            h0 -= (w1 / total) * math.log2(w1 / total)
        if h0 <= 0.0:
            continue
        best_gain = 0.0
        best_thr = 0.0
        step = (hi - lo) / (n_cand + 1.0)
        for i in range(1, n_cand + 1):
            thr = lo + step * i
            left0 = 0.0
            left1 = 0.0
            for c in range(2):
                w = ns[c, f]
                if w <= 0.0:
                    continue
                var = m2s[c, f] / w
                if var < var_floor:
                    var = var_floor
                z = (thr - means[c, f]) / math.sqrt(var)
                mass = w * 0.5 * (1.0 + math.erf(z / _SQRT2))
                if c == 0:
                    left0 = mass
                else:
                    left1 = mass
            left = left0 + left1
            right = total - left
            if left < 1e-12 or right < 1e-12:
                continue
            h_left = 0.0
            if left0 > 0.0:
                h_left -= (left0 / left) * math.log2(left0 / left)
            if left1 > 0.0:
                h_left -= (left1 / left) * math.log2(left1 / left)
            r0 = w0 - left0
            r1 = w1 - left1
            h_right = 0.0
            if r0 > 0.0:
                h_right -= (r0 / right) * math.log2(r0 / right)
            if r1 > 0.0:
                h_right -= (r1 / right) * math.log2(r1 / right)
            gain = h0 - (left * h_left + right * h_right) / total
            if gain > best_gain:
                best_gain = gain
                best_thr = thr
        gains[f] = best_gain
        thresholds[f] = best_thr


def _adwin_step_loop(bsum, bvar, rowcnt, agg, value, delta, do_scan):
    """One adaptive-window step: insert, compress, optionally scan and cut.

    ``agg`` holds the window aggregate [count, mean, m2]. Returns 1 when a
    cut was made (distribution change), else 0. On a cut, every bucket on
    the older side of the violating boundary is discarded and the aggregate
    is rebuilt from the survivors.
    """
    # append the new value as a size-1 bucket on row 0
    k = int(rowcnt[0])
    bsum[0, k] = value
    bvar[0, k] = 0.0
    rowcnt[0] = k + 1

    n = agg[0] + 1.0
    d = value - agg[1]
    mean = agg[1] + d / n
    agg[0] = n
    agg[1] = mean
    agg[2] = agg[2] + d * (value - mean)

    # compress rows that exceed capacity: merge the two oldest buckets
    for lvl in range(ADWIN_LEVELS - 1):
        cnt = int(rowcnt[lvl])
        if cnt <= ADWIN_ROW_CAP:
            break
        size = 2.0 ** lvl
        s0 = bsum[lvl, 0]
        s1 = bsum[lvl, 1]
        v0 = bvar[lvl, 0]
        v1 = bvar[lvl, 1]
        dm = s0 / size - s1 / size
        merged_var = v0 + v1 + dm * dm * size * size / (2.0 * size)
        up = int(rowcnt[lvl + 1])
        bsum[lvl + 1, up] = s0 + s1
        bvar[lvl + 1, up] = merged_var
        rowcnt[lvl + 1] = up + 1
        for i in range(cnt - 2):
            bsum[lvl, i] = bsum[lvl, i + 2]
            bvar[lvl, i] = bvar[lvl, i + 2]
        rowcnt[lvl] = cnt - 2

    if do_scan == 0:
        return 0

    # shrink repeatedly: drop the old side of the first violating boundary
    # and rescan until every boundary is consistent
    detected = 0
    min_side = 5.0
    while True:
        total_n = agg[0]
        if total_n < 10.0:
            break
        total_sum = agg[1] * total_n
        variance = agg[2] / total_n
        dd = math.log(2.0 * math.log(total_n) / delta)

        # walk buckets oldest -> newest: highest row first, slot 0 first
        n0 = 0.0
        s0 = 0.0
        cut_level = -1
        cut_slot = -1
        for lvl in range(ADWIN_LEVELS - 1, -1, -1):
            cnt = int(rowcnt[lvl])
            if cnt == 0:
                continue
            size = 2.0 ** lvl
            for slot in range(cnt):
                n0 += size
                s0 += bsum[lvl, slot]
                n1 = total_n - n0
                if n0 < min_side or n1 < min_side:
                    continue
                mu0 = s0 / n0
                mu1 = (total_sum - s0) / n1
                m = 1.0 / n0 + 1.0 / n1
                eps = math.sqrt(2.0 * m * variance * dd) + (2.0 / 3.0) * m * dd
                diff = mu0 - mu1
                if diff < 0.0:
                    diff = -diff
                if diff > eps:
                    cut_level = lvl
                    cut_slot = slot
                    break
            if cut_level >= 0:
                break

        if cut_level < 0:
            break
        detected = 1

        # drop rows older than the cut row entirely, plus slots <= cut_slot
        for lvl in range(ADWIN_LEVELS - 1, cut_level, -1):
            rowcnt[lvl] = 0
        cnt = int(rowcnt[cut_level])
        keep = cnt - (cut_slot + 1)
        for i in range(keep):
            bsum[cut_level, i] = bsum[cut_level, i + cut_slot + 1]
            bvar[cut_level, i] = bvar[cut_level, i + cut_slot + 1]
        rowcnt[cut_level] = keep

        # rebuild the aggregate from the surviving buckets (Chan combine)
        rn = 0.0
        rmean = 0.0
        rm2 = 0.0
        for lvl in range(ADWIN_LEVELS - 1, -1, -1):
            cnt = int(rowcnt[lvl])
            size = 2.0 ** lvl
            for slot in range(cnt):
                bn = size
                bmean = bsum[lvl, slot] / size
                bm2 = bvar[lvl, slot]
                tot = rn + bn
                dm = bmean - rmean
                rm2 = rm2 + bm2 + dm * dm * rn * bn / tot
                rmean = rmean + dm * bn / tot
                rn = tot
        agg[0] = rn
        agg[1] = rmean
        agg[2] = rm2
    return detected


# ---------------------------------------------------------------------------
# numpy backend (vectorized where the shape of the work allows it)
# ---------------------------------------------------------------------------

def _welford_update_numpy(ns, means, m2s, mins, maxs, x, w):
    seen = ~np.isnan(x)
    if not seen.any():
        return
    v = x[seen]
    n = ns[seen] + w
    delta = v - means[seen]
    mean = means[seen] + w * delta / n
    ns[seen] = n
    m2s[seen] += w * delta * (v - mean)
    means[seen] = mean
    mins[seen] = np.minimum(mins[seen], v)
    maxs[seen] = np.maximum(maxs[seen], v)


def _gaussian_joint_loglik_numpy(ns, means, m2s, x, var_floor, out):
    valid = ~np.isnan(x) & (ns >= 1.0).all(axis=0)
    out[:] = 0.0
    if not valid.any():
        return
    v = x[valid]
    n = ns[:, valid]
    var = np.maximum(m2s[:, valid] / n, var_floor)
    d = v[None, :] - means[:, valid]
    out[:] = (-0.5 * (_LOG_2PI + np.log(var) + d * d / var)).sum(axis=1)


def _entropy2_vec(w0, w1):
    total = w0 + w1
    h = np.zeros_like(total)
    ok = total > 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        for w in (w0, w1):
            p = np.where(ok, w / np.where(ok, total, 1.0), 0.0)
            term = np.where(p > 0.0, p * np.log2(np.where(p > 0.0, p, 1.0)), 0.0)
            h -= term
    return h


def _split_gain_scan_numpy(ns, means, m2s, mins, maxs, n_cand, var_floor,
                           gains, thresholds):
    n_features = ns.shape[1]
    gains[:] = 0.0
    thresholds[:] = 0.0
    w0 = ns[0]
    w1 = ns[1]
    total = w0 + w1
    h0 = _entropy2_vec(w0, w1)
    feat_ok = (total > 0.0) & (maxs > mins) & (h0 > 0.0)
    if not feat_ok.any():
        return
    idx = np.nonzero(feat_ok)[0]
    steps = (maxs[idx] - mins[idx]) / (n_cand + 1.0)
    cand = mins[idx][:, None] + steps[:, None] * np.arange(1, n_cand + 1)[None, :]
    var = np.maximum(
        m2s[:, idx] / np.where(ns[:, idx] > 0.0, ns[:, idx], 1.0), var_floor
    )
    z = (cand[None, :, :] - means[:, idx, None]) / np.sqrt(var)[:, :, None]
    cdf = 0.5 * (1.0 + _sp_erf(z / _SQRT2))
    mass = np.where(ns[:, idx, None] > 0.0, ns[:, idx, None] * cdf, 0.0)
    left0, left1 = mass[0], mass[1]
    left = left0 + left1
    right = total[idx, None] - left
    h_left = _entropy2_vec(left0, left1)
    h_right = _entropy2_vec(w0[idx, None] - left0, w1[idx, None] - left1)
    gain = h0[idx, None] - (left * h_left + right * h_right) / total[idx, None]
    gain = np.where((left < 1e-12) | (right < 1e-12), 0.0, gain)
    best = gain.argmax(axis=1)
    rows = np.arange(idx.shape[0])
    best_gain = gain[rows, best]
    pos = best_gain > 0.0
    gains[idx[pos]] = best_gain[pos]
    thresholds[idx[pos]] = cand[rows, best][pos]


def _adwin_step_numpy(bsum, bvar, rowcnt, agg, value, delta, do_scan):
    # insert + compress are O(1) amortized; reuse the loop implementation
    k = int(rowcnt[0])
    bsum[0, k] = value
    bvar[0, k] = 0.0
    rowcnt[0] = k + 1
    n = agg[0] + 1.0
    d = value - agg[1]
    mean = agg[1] + d / n
    agg[0] = n
    agg[1] = mean
    agg[2] = agg[2] + d * (value - mean)

    for lvl in range(ADWIN_LEVELS - 1):
        cnt = int(rowcnt[lvl])
        if cnt <= ADWIN_ROW_CAP:
            break
        size = 2.0 ** lvl
        s0, s1 = bsum[lvl, 0], bsum[lvl, 1]
        dm = (s0 - s1) / size
        merged_var = bvar[lvl, 0] + bvar[lvl, 1] + dm * dm * size / 2.0
        up = int(rowcnt[lvl + 1])
        bsum[lvl + 1, up] = s0 + s1
        bvar[lvl + 1, up] = merged_var
        rowcnt[lvl + 1] = up + 1
        bsum[lvl, : cnt - 2] = bsum[lvl, 2:cnt]
        bvar[lvl, : cnt - 2] = bvar[lvl, 2:cnt]
        rowcnt[lvl] = cnt - 2

    if do_scan == 0:
        return 0

    detected = 0
    scratch_sizes = np.empty(ADWIN_LEVELS * _ADWIN_SLOTS)
    scratch_sums = np.empty(ADWIN_LEVELS * _ADWIN_SLOTS)
    while True:
        total_n = agg[0]
        if total_n < 10.0:
            break

        # flatten live buckets oldest -> newest into reusable scratch
        pos = 0
        levels = []
        for lvl in range(ADWIN_LEVELS - 1, -1, -1):
            cnt = int(rowcnt[lvl])
            if cnt == 0:
                continue
            levels.append(lvl)
            scratch_sizes[pos: pos + cnt] = 2.0 ** lvl
            scratch_sums[pos: pos + cnt] = bsum[lvl, :cnt]
            pos += cnt
        n0 = np.cumsum(scratch_sizes[:pos])
        s0 = np.cumsum(scratch_sums[:pos])
        n1 = total_n - n0
        total_sum = agg[1] * total_n
        variance = agg[2] / total_n
        dd = math.log(2.0 * math.log(total_n) / delta)
        with np.errstate(divide="ignore", invalid="ignore"):
            mu0 = s0 / n0
            mu1 = (total_sum - s0) / np.where(n1 > 0, n1, 1.0)
            m = 1.0 / n0 + 1.0 / np.where(n1 > 0, n1, 1.0)
            eps = np.sqrt(2.0 * m * variance * dd) + (2.0 / 3.0) * m * dd
            viol = (np.abs(mu0 - mu1) > eps) & (n0 >= 5.0) & (n1 >= 5.0)
        if not viol.any():
            break
        detected = 1
        cut = int(np.argmax(viol))

        # map the flat cut index back to (level, slot) and drop the old side
        offset = 0
        for lvl in levels:
            cnt = int(rowcnt[lvl])
            if cut < offset + cnt:
                slot = cut - offset
                for higher in range(ADWIN_LEVELS - 1, lvl, -1):
                    rowcnt[higher] = 0
                keep = cnt - (slot + 1)
                bsum[lvl, :keep] = bsum[lvl, slot + 1: cnt]
                bvar[lvl, :keep] = bvar[lvl, slot + 1: cnt]
                rowcnt[lvl] = keep
                break
            offset += cnt

        rn = 0.0
        rmean = 0.0
        rm2 = 0.0
        for lvl in range(ADWIN_LEVELS - 1, -1, -1):
            cnt = int(rowcnt[lvl])
            size = 2.0 ** lvl
            for slot in range(cnt):
                bn = size
                bmean = bsum[lvl, slot] / size
                tot = rn + bn
                dm = bmean - rmean
                rm2 = rm2 + bvar[lvl, slot] + dm * dm * rn * bn / tot
                rmean = rmean + dm * bn / tot
                rn = tot
        agg[0] = rn
        agg[1] = rmean
        agg[2] = rm2
    return detected


# ---------------------------------------------------------------------------
# backend selection
# ---------------------------------------------------------------------------

_NUMPY_IMPLS = {
    "welford_update": _welford_update_numpy,
    "gaussian_joint_loglik": _gaussian_joint_loglik_numpy,
    "split_gain_scan": _split_gain_scan_numpy,
    "adwin_step": _adwin_step_numpy,
}

_NUMBA_IMPLS = None
if _numba_requested():
    try:
        from numba import njit

        _NUMBA_IMPLS = {
            "welford_update": njit(cache=True)(_welford_update_loop),
            "gaussian_joint_loglik": njit(cache=True)(_gaussian_joint_loglik_loop),
            "split_gain_scan": njit(cache=True)(_split_gain_scan_loop),
            "adwin_step": njit(cache=True)(_adwin_step_loop),
        }
    except ImportError:
        _NUMBA_IMPLS = None

if _NUMBA_IMPLS is not None:
    BACKEND = "numba"
    _ACTIVE = _NUMBA_IMPLS
else:
    BACKEND = "numpy"
    _ACTIVE = _NUMPY_IMPLS

welford_update = _ACTIVE["welford_update"]
gaussian_joint_loglik = _ACTIVE["gaussian_joint_loglik"]
split_gain_scan = _ACTIVE["split_gain_scan"]
adwin_step = _ACTIVE["adwin_step"]


def available_backends():
    """Mapping backend name -> kernel dict, for benchmarks and tests."""
    out = {"numpy": dict(_NUMPY_IMPLS)}
    if _NUMBA_IMPLS is not None:
        out["numba"] = dict(_NUMBA_IMPLS)
    return out


def warmup():
    """Trigger JIT compilation of every kernel (no-op on the numpy backend)."""
    ns = np.zeros((2, 3))
    means = np.zeros((2, 3))
    m2s = np.zeros((2, 3))
    mins = np.full(3, np.inf)
    maxs = np.full(3, -np.inf)
    x = np.array([1.0, np.nan, 2.0])
    welford_update(ns[0], means[0], m2s[0], mins, maxs, x, 1.0)
    welford_update(ns[1], means[1], m2s[1], mins, maxs, x + 1.0, 1.0)
    out = np.zeros(2)
    gaussian_joint_loglik(ns, means, m2s, x, 1e-9, out)
    gains = np.zeros(3)
    thresholds = np.zeros(3)
    split_gain_scan(ns, means, m2s, mins, maxs, 10, 1e-9, gains, thresholds)
    bsum = np.zeros((ADWIN_LEVELS, _ADWIN_SLOTS))
    bvar = np.zeros((ADWIN_LEVELS, _ADWIN_SLOTS))
    rowcnt = np.zeros(ADWIN_LEVELS, dtype=np.int64)
    agg = np.zeros(3)
    for i in range(20):
        adwin_step(bsum, bvar, rowcnt, agg, float(i % 2), 0.002, 1)


def new_adwin_arrays():
    """Fresh (bsum, bvar, rowcnt, agg) state arrays for an adaptive window."""
    return (
        np.zeros((ADWIN_LEVELS, _ADWIN_SLOTS)),
        np.zeros((ADWIN_LEVELS, _ADWIN_SLOTS)),
        np.zeros(ADWIN_LEVELS, dtype=np.int64),
        np.zeros(3),
    )

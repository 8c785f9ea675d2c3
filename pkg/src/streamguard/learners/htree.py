"""Incremental decision trees split by the Hoeffding bound, with an adaptive
variant that monitors every internal node for distribution change.

Leaves keep per-class Gaussian moments per feature; numeric splits are
binary thresholds scored by information gain over ten candidate cut points
(kernel-evaluated). A leaf splits once the gain gap between its best and
second-best feature beats the Hoeffding radius, or the radius has shrunk
under the tie threshold while some positive gain exists.

The adaptive variant hangs a change detector on each internal node, fed with
the 0/1 error of the subtree's own leaf prediction. A detection starts a
background subtree in place; once the background's error window is
significantly better, it replaces the original subtree wholesale.
"""

from __future__ import annotations

import math
import pickle
from dataclasses import dataclass

import numpy as np

from streamguard import kernels
from streamguard.learners.adwin import Adwin

VAR_FLOOR = 1e-9
_MIN_SWAP_OBS = 50.0
_SIZE_CHECK_EVERY = 1000


def hoeffding_bound(value_range: float, delta: float, n: float) -> float:
    """epsilon = sqrt(R^2 * ln(1/delta) / (2n))."""
    if not n >= 1:
        raise ValueError("n must be >= 1")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must be in (0, 1)")
    return math.sqrt(value_range * value_range * math.log(1.0 / delta) / (2.0 * n))


@dataclass
class HoeffdingTreeParams:
    max_depth: int | None = 200
    tie_threshold: float = 0.005
    max_size_mb: float = 200.0
    grace_period: float = 200.0
    split_confidence: float = 1e-7
    n_split_candidates: int = 10
    warn_delta: float = 0.01
    drift_delta: float = 0.002


class _Leaf:
    __slots__ = (
        "class_weights", "ns", "means", "m2s", "mins", "maxs",
        "depth", "node_id", "last_attempt_weight", "active",
    )

    def __init__(self, n_features: int, depth: int, node_id: int,
                 class_weights=None):
        self.class_weights = (
            np.zeros(2) if class_weights is None
            else np.asarray(class_weights, dtype=float)
        )
        self.ns = np.zeros((2, n_features))
        self.means = np.zeros((2, n_features))
        self.m2s = np.zeros((2, n_features))
        self.mins = np.full(n_features, np.inf)
        self.maxs = np.full(n_features, -np.inf)
        self.depth = depth
        self.node_id = node_id
        self.last_attempt_weight = 0.0
        self.active = True

    @property
    def total_weight(self) -> float:
        return float(self.class_weights.sum())

    def majority(self) -> int:
        return int(np.argmax(self.class_weights))

    def proba(self) -> np.ndarray:
        smoothed = self.class_weights + 1.0  # Laplace add-1
        return smoothed / smoothed.sum()

    def deactivate(self) -> None:
        self.active = False
        self.ns = self.means = self.m2s = None
        self.mins = self.maxs = None

    def promise(self) -> float:
        """How much error mass splitting this leaf could still remove."""
        total = self.total_weight
        if total <= 0.0:
            return 0.0
        return total - float(self.class_weights.max())


class _Split:
    __slots__ = ("feature", "threshold", "left", "right", "weight", "depth",
                 "err_adwin", "bg", "bg_adwin")

    def __init__(self, feature: int, threshold: float, left, right, depth: int = 0):
        self.feature = feature
        self.threshold = threshold
        self.left = left
        self.right = right
        self.weight = 0.0
        self.depth = depth
        self.err_adwin = None  # adaptive variant only
        self.bg = None
        self.bg_adwin = None

    def route(self, x: np.ndarray):
        v = x[self.feature]
        if math.isnan(v):
            lw = _subtree_weight(self.left)
            rw = _subtree_weight(self.right)
            return self.left if lw >= rw else self.right
        return self.left if v <= self.threshold else self.right


def _subtree_weight(node) -> float:
    return node.weight if isinstance(node, _Split) else node.total_weight


class HoeffdingTree:
    """Plain (non-adaptive) incremental tree; base learner of the forest."""

    adaptive = False

    def __init__(self, n_features: int, params: HoeffdingTreeParams | None = None):
        self.n_features = n_features
        self.params = params or HoeffdingTreeParams()
        self._next_node_id = 0
        self.root = self._new_leaf(depth=0)
        self.n_splits = 0
        self._learn_calls = 0

    # -- structure helpers -------------------------------------------------

    def _new_leaf(self, depth: int, class_weights=None) -> _Leaf:
        leaf = _Leaf(self.n_features, depth, self._next_node_id, class_weights)
        self._next_node_id += 1
        return leaf

    def _descend(self, x: np.ndarray, w: float = 0.0):
        """Walk to the leaf for ``x``; returns (split path, leaf).
        ``w`` accumulates on traversed split nodes for NaN routing."""
        path = []
        node = self.root
        while isinstance(node, _Split):
            node.weight += w
            path.append(node)
            node = node.route(x)
        return path, node

    # -- prediction --------------------------------------------------------

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        _, leaf = self._descend(x)
        return leaf.proba()

    def predict(self, x: np.ndarray) -> int:
        _, leaf = self._descend(x)
        return leaf.majority()

    # -- learning ----------------------------------------------------------

    def learn_one(self, x: np.ndarray, y: int, w: float = 1.0) -> None:
        self._learn_calls += 1
        path, leaf = self._descend(x, w)
        replace = self._replacer_for(path, leaf)
        self._update_leaf(leaf, x, y, w, replace)
        if self._learn_calls % _SIZE_CHECK_EVERY == 0:
            self._enforce_size()

    def _replacer_for(self, path, node):
        """Callable that swaps ``node`` for a new subtree in its slot."""
        if not path:
            def replace(new):
                self.root = new
        else:
            parent = path[-1]
            side = "left" if parent.left is node else "right"

            def replace(new):
                setattr(parent, side, new)
        return replace

    def _update_leaf(self, leaf: _Leaf, x, y, w, replace) -> bool:
        """Update stats and maybe split; True when the leaf split."""
        leaf.class_weights[y] += w
        if not leaf.active:
            return False
        kernels.welford_update(
            leaf.ns[y], leaf.means[y], leaf.m2s[y], leaf.mins, leaf.maxs, x, w
        )
        p = self.params
        if p.max_depth is not None and leaf.depth >= p.max_depth:
            return False
        total = leaf.total_weight
        if total - leaf.last_attempt_weight < p.grace_period:
            return False
        leaf.last_attempt_weight = total
        return self._attempt_split(leaf, replace)

    def _attempt_split(self, leaf: _Leaf, replace) -> bool:
        p = self.params
        gains = np.zeros(self.n_features)
        thresholds = np.zeros(self.n_features)
        kernels.split_gain_scan(
            leaf.ns, leaf.means, leaf.m2s, leaf.mins, leaf.maxs,
            p.n_split_candidates, VAR_FLOOR, gains, thresholds,
        )
        best = int(np.argmax(gains))  # first max = smallest feature index
        g1 = float(gains[best])
        if g1 <= 1e-12:
            return False
        gains[best] = -1.0
        g2 = max(0.0, float(gains[int(np.argmax(gains))]))
        eps = hoeffding_bound(1.0, p.split_confidence, leaf.total_weight)
        if not (g1 - g2 > eps or eps < p.tie_threshold):
            return False

        # never grow past the byte budget; freeze this leaf if there is no
        # room even after deactivating the least promising leaves
        limit = p.max_size_mb * 1024 * 1024
        cost = self._split_cost_bytes()
        if self.estimate_size_bytes() + cost > limit:
            self._enforce_size()
            if self.estimate_size_bytes() + cost > limit:
                leaf.deactivate()
                return False

        threshold = float(thresholds[best])
        left_w, right_w = self._projected_children(leaf, best, threshold)
        left = self._new_leaf(leaf.depth + 1, left_w)
        right = self._new_leaf(leaf.depth + 1, right_w)
        split = _Split(best, threshold, left, right, depth=leaf.depth)
        split.weight = leaf.total_weight
        if self.adaptive:
            split.err_adwin = Adwin(p.warn_delta)
        replace(split)
        self.n_splits += 1
        return True

    def _projected_children(self, leaf: _Leaf, feature: int, threshold: float):
        """Class mass each side of the cut under the leaf's Gaussians; used
        as the children's starting class distribution."""
        left = np.zeros(2)
        right = np.zeros(2)
        for c in (0, 1):
            w = leaf.ns[c, feature]
            if w <= 0.0:
                continue
            var = max(leaf.m2s[c, feature] / w, VAR_FLOOR)
            z = (threshold - leaf.means[c, feature]) / math.sqrt(var)
            mass = w * 0.5 * (1.0 + math.erf(z / math.sqrt(2.0)))
            left[c] = mass
            right[c] = w - mass
        return left, right

    # -- memory ------------------------------------------------------------

    # conservative per-node pickle costs (numpy array headers dominate the
    # small structures; calibrated against serialized_size_bytes)
    _NODE_BYTES = 700
    _ADWIN_BYTES = 3800

    def _leaf_stat_bytes(self) -> int:
        return 64 * self.n_features + 900

    def _split_cost_bytes(self) -> int:
        extra = self._ADWIN_BYTES if self.adaptive else 0
        return 2 * (self._NODE_BYTES + self._leaf_stat_bytes()) + self._NODE_BYTES + extra

    def estimate_size_bytes(self) -> int:
        total = 0
        for node in self._iter_nodes():
            total += self._NODE_BYTES
            if isinstance(node, _Split):
                if node.err_adwin is not None:
                    total += self._ADWIN_BYTES
                if node.bg_adwin is not None:
                    total += self._ADWIN_BYTES
            elif node.active:
                total += self._leaf_stat_bytes()
        return total

    def _iter_nodes(self):
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            if isinstance(node, _Split):
                stack.append(node.left)
                stack.append(node.right)
                if node.bg is not None:
                    stack.append(node.bg)

    def _enforce_size(self) -> None:
        limit = self.params.max_size_mb * 1024 * 1024
        if self.estimate_size_bytes() <= limit:
            return
        leaves = [n for n in self._iter_nodes() if isinstance(n, _Leaf) and n.active]
        # deactivate the least promising leaves first; ids break ties
        leaves.sort(key=lambda lf: (lf.promise(), lf.node_id))
        target = limit * 0.9
        for leaf in leaves:
            if self.estimate_size_bytes() <= target:
                break
            leaf.deactivate()

    def serialized_size_bytes(self) -> int:
        return len(pickle.dumps(self, protocol=pickle.HIGHEST_PROTOCOL))


class HoeffdingAdaptiveTree(HoeffdingTree):
    """Hoeffding tree whose internal nodes detect drift and regrow."""

    adaptive = True

    def learn_one(self, x: np.ndarray, y: int, w: float = 1.0) -> None:
        self._learn_calls += 1
        path, leaf = self._descend(x, w)
        err = 1.0 if leaf.majority() != y else 0.0
        self._update_leaf(leaf, x, y, w, self._replacer_for(path, leaf))

        for i, node in enumerate(path):
            if i == 0:
                def replace(new):
                    self.root = new
            else:
                parent = path[i - 1]
                side = "left" if parent.left is node else "right"

                def replace(new, parent=parent, side=side):
                    setattr(parent, side, new)
            if self._process_adaptive_node(node, replace, x, y, w, err):
                break  # subtree swapped out; deeper path nodes are gone
        if self._learn_calls % _SIZE_CHECK_EVERY == 0:
            self._enforce_size()

    def _process_adaptive_node(self, node: _Split, replace, x, y, w, err) -> bool:
        p = self.params
        if node.err_adwin is None:
            node.err_adwin = Adwin(p.warn_delta)
        changed = node.err_adwin.update(err)
        if changed and node.bg is None:
            bg_cost = self._NODE_BYTES + self._leaf_stat_bytes() + self._ADWIN_BYTES
            if self.estimate_size_bytes() + bg_cost <= p.max_size_mb * 1024 * 1024:
                node.bg = self._new_leaf(depth=node.depth)
                node.bg_adwin = Adwin(p.warn_delta)
        if node.bg is None:
            return False

        bg_path, bg_leaf = self._bg_descend(node, x, w)
        bg_err = 1.0 if bg_leaf.majority() != y else 0.0
        node.bg_adwin.update(bg_err)
        if not bg_path:
            def bg_replace(new, node=node):
                node.bg = new
        else:
            bg_parent = bg_path[-1]
            bg_side = "left" if bg_parent.left is bg_leaf else "right"

            def bg_replace(new, parent=bg_parent, side=bg_side):
                setattr(parent, side, new)
        self._update_leaf(bg_leaf, x, y, w, bg_replace)

        nm = node.err_adwin.width
        nb = node.bg_adwin.width
        if nm >= _MIN_SWAP_OBS and nb >= _MIN_SWAP_OBS:
            diff = node.err_adwin.mean - node.bg_adwin.mean
            radius = math.sqrt(
                0.5 * math.log(1.0 / p.drift_delta) * (1.0 / nm + 1.0 / nb)
            )
            if diff > radius:
                replace(node.bg)  # background wins the slot
                return True
            if -diff > radius:
                node.bg = None  # background is significantly worse: drop it
                node.bg_adwin = None
        return False

    def _bg_descend(self, owner: _Split, x, w: float):
        path = []
        node = owner.bg
        while isinstance(node, _Split):
            node.weight += w
            path.append(node)
            node = node.route(x)
        return path, node

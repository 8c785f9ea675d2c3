"""Online random forest: Hoeffding-tree members trained on Poisson-weighted
copies of each sample over fixed random feature subsets, with per-member
warning and drift detectors driving background-tree replacement.

One seeded generator feeds every random draw (member subsets, Poisson
weights, replacement subsets) in a fixed order, so a run is reproducible
bit-for-bit for a given seed and stream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from streamguard.learners.adwin import Adwin
from streamguard.learners.htree import HoeffdingTree, HoeffdingTreeParams


@dataclass
class ArfParams:
    n_models: int = 100
    max_features: int | str = 25  # int or "sqrt"
    lam: float = 25.0
    tree_params: HoeffdingTreeParams | None = None
    warn_delta: float = 0.01
    drift_delta: float = 0.002
    disable_weighting: bool = False  # every sample weight 1 (collapse tests)
    disable_detectors: bool = False

    def resolve_subspace(self, n_features: int) -> int:
        if self.max_features == "sqrt":
            return max(1, int(np.sqrt(n_features)))
        return max(1, min(int(self.max_features), n_features))


class _Member:
    __slots__ = ("tree", "features", "warn", "drift", "bg_tree", "bg_features")

    def __init__(self, tree: HoeffdingTree, features: np.ndarray,
                 warn: Adwin | None, drift: Adwin | None):
        self.tree = tree
        self.features = features  # sorted global feature indices
        self.warn = warn
        self.drift = drift
        self.bg_tree = None
        self.bg_features = None


class AdaptiveRandomForest:
    def __init__(self, n_features: int, params: ArfParams | None = None,
                 seed: int = 1):
        self.n_features = n_features
        self.params = params or ArfParams()
        self.rng = np.random.default_rng(seed)
        self.n_drifts = 0
        self.n_warnings = 0
        k = self.params.resolve_subspace(n_features)
        self._subspace = k
        self.members = [
            _Member(
                self._new_tree(),
                self._draw_features(),
                None if self.params.disable_detectors else Adwin(self.params.warn_delta),
                None if self.params.disable_detectors else Adwin(self.params.drift_delta),
            )
            for _ in range(self.params.n_models)
        ]

    def _new_tree(self) -> HoeffdingTree:
        return HoeffdingTree(self._subspace, self.params.tree_params)

    def _draw_features(self) -> np.ndarray:
        if self._subspace >= self.n_features:
            return np.arange(self.n_features)
        picks = self.rng.choice(self.n_features, size=self._subspace, replace=False)
        return np.sort(picks)

    def learn_one(self, x: np.ndarray, y: int) -> None:
        p = self.params
        if p.disable_weighting:
            weights = np.ones(len(self.members))
        else:
            weights = self.rng.poisson(p.lam, size=len(self.members)).astype(float)
        for member, w in zip(self.members, weights):
            xs = x[member.features]
            if member.warn is not None:
                err = 1.0 if member.tree.predict(xs) != y else 0.0
                if member.warn.update(err) and member.bg_tree is None:
                    self.n_warnings += 1
                    member.bg_tree = self._new_tree()
                    member.bg_features = self._draw_features()
                    member.warn = Adwin(p.warn_delta)
                if member.drift.update(err):
                    self.n_drifts += 1
                    if member.bg_tree is not None:
                        member.tree = member.bg_tree
                        member.features = member.bg_features
                    else:
                        member.tree = self._new_tree()
                        member.features = self._draw_features()
                    member.bg_tree = None
                    member.bg_features = None
                    member.warn = Adwin(p.warn_delta)
                    member.drift = Adwin(p.drift_delta)
                    xs = x[member.features]
            if w > 0.0:
                member.tree.learn_one(xs, y, w)
                if member.bg_tree is not None:
                    member.bg_tree.learn_one(x[member.bg_features], y, w)

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        acc = np.zeros(2)
        for member in self.members:
            acc += member.tree.predict_proba(x[member.features])
        total = acc.sum()
        if total <= 0.0:
            return np.array([0.5, 0.5])
        return acc / total

    def predict(self, x: np.ndarray) -> int:
        return int(np.argmax(self.predict_proba(x)))

    def estimate_size_bytes(self) -> int:
        total = 0
        for member in self.members:
            total += member.tree.estimate_size_bytes()
            if member.bg_tree is not None:
                total += member.bg_tree.estimate_size_bytes()
        return total

"""Two-stage feature selection.

Cold start: a seeded offline random forest ranks features by mean decrease
in impurity; features at or above the mean importance survive. This runs
exactly once, on the cold-start buffer.

Streaming: running variance per retained feature; a feature whose sample
variance is exactly zero (after at least two observations) drops out of the
mask and returns as soon as its variance turns positive. The mask version
increments only when membership actually changes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.ensemble import RandomForestClassifier

from streamguard import kernels

_MIN_JUDGE_SAMPLES = 2  # variance of fewer observations says nothing


@dataclass(frozen=True)
class SelectionMask:
    active: frozenset[str]
    stage: str  # "cold_start" | "streaming"
    version: int

    def __contains__(self, name: str) -> bool:
        return name in self.active

    def sorted_names(self) -> list[str]:
        return sorted(self.active)

    def to_text(self) -> str:
        lines = [f"stage\t{self.stage}", f"version\t{self.version}"]
        lines += [f"feature\t{name}" for name in self.sorted_names()]
        return "\n".join(lines) + "\n"


def mdi_importances(matrix: np.ndarray, labels: np.ndarray,
                    feature_names: list[str], seed: int = 1) -> dict[str, float]:
    """Impurity-decrease importances from a 100-tree Gini forest with
    bootstrap, normalized to sum to 1."""
    labels = np.asarray(labels)
    if matrix.shape[0] == 0:
        raise ValueError("cold start required: empty buffer")
    if len(np.unique(labels)) < 2:
        raise ValueError("cold start requires both classes")
    forest = RandomForestClassifier(
        n_estimators=100,
        criterion="gini",
        bootstrap=True,
        random_state=seed,
        n_jobs=1,
    )
    forest.fit(matrix, labels)
    return dict(zip(feature_names, forest.feature_importances_))


def select_from_importances(importances: dict[str, float]) -> SelectionMask:
    """Mean-threshold rule: keep features with importance >= the mean."""
    if not importances:
        raise ValueError("no importances to select from")
    mean = sum(importances.values()) / len(importances)
    active = frozenset(n for n, v in importances.items() if v >= mean)
    return SelectionMask(active=active, stage="cold_start", version=1)


class VarianceTracker:
    """Running variance per retained feature over the streaming phase."""

    def __init__(self, feature_names: list[str], initial_mask: SelectionMask):
        self.feature_names = list(feature_names)
        self._order = {n: i for i, n in enumerate(self.feature_names)}
        n = len(self.feature_names)
        self.ns = np.zeros(n)
        self.means = np.zeros(n)
        self.m2s = np.zeros(n)
        self._mins = np.full(n, np.inf)
        self._maxs = np.full(n, -np.inf)
        self.mask = SelectionMask(
            active=initial_mask.active, stage="streaming",
            version=initial_mask.version,
        )

    def update(self, features: dict[str, float]) -> SelectionMask:
        x = np.full(len(self.feature_names), np.nan)
        for name, value in features.items():
            idx = self._order.get(name)
            if idx is not None:
                x[idx] = value
        kernels.welford_update(self.ns, self.means, self.m2s,
                               self._mins, self._maxs, x, 1.0)
        active = frozenset(
            name
            for i, name in enumerate(self.feature_names)
            if self.ns[i] < _MIN_JUDGE_SAMPLES or self.m2s[i] > 0.0
        )
        if active != self.mask.active:
            self.mask = SelectionMask(
                active=active, stage="streaming", version=self.mask.version + 1
            )
        return self.mask


@dataclass
class ColdStartSelection:
    importances: dict[str, float] = field(default_factory=dict)
    mask: SelectionMask | None = None


def run_cold_start_selection(matrix: np.ndarray, labels: np.ndarray,
                             feature_names: list[str], seed: int = 1) -> ColdStartSelection:
    imp = mdi_importances(matrix, labels, feature_names, seed=seed)
    return ColdStartSelection(importances=imp, mask=select_from_importances(imp))

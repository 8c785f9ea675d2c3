"""Streaming confusion-matrix metrics with "present" as the positive class.

Derived metrics follow the 0-when-undefined convention so an all-zero
matrix reports zeros rather than NaNs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

CLASSES = ("absent", "present")


def _safe_div(num: float, den: float) -> float:
    return num / den if den > 0 else 0.0


def _f1(precision: float, recall: float) -> float:
    return _safe_div(2 * precision * recall, precision + recall)


@dataclass
class MetricsSnapshot:
    accuracy: float
    precision: dict
    recall: dict
    f1: dict
    samples_seen: int
    counts: dict

    def as_dict(self) -> dict:
        return {
            "samples_seen": self.samples_seen,
            "accuracy": self.accuracy,
            "precision": dict(self.precision),
            "recall": dict(self.recall),
            "f1": dict(self.f1),
            "counts": dict(self.counts),
        }


@dataclass
class StreamMetrics:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0
    samples_seen: int = field(default=0)

    def update(self, predicted: str, actual: str) -> None:
        if predicted not in CLASSES or actual not in CLASSES:
            raise ValueError(f"labels must be one of {CLASSES}")
        self.samples_seen += 1
        if actual == "present":
            if predicted == "present":
                self.tp += 1
            else:
                self.fn += 1
        else:
            if predicted == "present":
                self.fp += 1
            else:
                self.tn += 1

    def snapshot(self) -> MetricsSnapshot:
        return compute_metrics(self.tp, self.fp, self.tn, self.fn)

    @property
    def accuracy(self) -> float:
        return self.snapshot().accuracy

    @property
    def macro_f1(self) -> float:
        return self.snapshot().f1["macro"]


def compute_metrics(tp: int, fp: int, tn: int, fn: int) -> MetricsSnapshot:
    """All derived metrics from the four confusion counts.

    Per-class precision/recall treat that class as positive; "absent"
    therefore reads the matrix mirrored. Macro values are unweighted means.
    """
    if min(tp, fp, tn, fn) < 0:
        raise ValueError("confusion counts must be non-negative")
    total = tp + fp + tn + fn
    accuracy = _safe_div(tp + tn, total)

    p_present = _safe_div(tp, tp + fp)
    r_present = _safe_div(tp, tp + fn)
    p_absent = _safe_div(tn, tn + fn)
    r_absent = _safe_div(tn, tn + fp)
    f_present = _f1(p_present, r_present)
    f_absent = _f1(p_absent, r_absent)

    return MetricsSnapshot(
        accuracy=accuracy,
        precision={
            "absent": p_absent,
            "present": p_present,
            "macro": (p_absent + p_present) / 2,
        },
        recall={
            "absent": r_absent,
            "present": r_present,
            "macro": (r_absent + r_present) / 2,
        },
        f1={
            "absent": f_absent,
            "present": f_present,
            "macro": (f_absent + f_present) / 2,
        },
        samples_seen=total,
        counts={"tp": tp, "fp": fp, "tn": tn, "fn": fn},
    )

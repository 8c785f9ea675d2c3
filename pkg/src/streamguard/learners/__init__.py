"""Incremental binary classifiers and the drift detector.

All learners consume dense float vectors (NaN marks a masked-out feature)
and integer labels 0/1 mapped onto the class names below. They are
single-writer state machines: one owner interleaves learn/predict calls.
"""

from streamguard.learners.adwin import Adwin
from streamguard.learners.gnb import GaussianNaiveBayes
from streamguard.learners.htree import (
    HoeffdingAdaptiveTree,
    HoeffdingTree,
    HoeffdingTreeParams,
    hoeffding_bound,
)
from streamguard.learners.forest import AdaptiveRandomForest, ArfParams

CLASSES = ("absent", "present")

__all__ = [
    "Adwin",
    "AdaptiveRandomForest",
    "ArfParams",
    "CLASSES",
    "GaussianNaiveBayes",
    "HoeffdingAdaptiveTree",
    "HoeffdingTree",
    "HoeffdingTreeParams",
    "hoeffding_bound",
]

"""streamguard: real-time text-stream moderation.

Incremental learners (Gaussian naive Bayes, Hoeffding trees with adaptive
drift handling, an online random forest) consume LLM-derived boolean trait
features plus formula-based text features, behind a two-stage feature
filter, with prequential evaluation and an explainable moderation service
on top.
"""

from streamguard.kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"
__all__ = ["KERNEL_BACKEND", "__version__"]

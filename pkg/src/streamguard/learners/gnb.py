"""Incremental Gaussian naive Bayes for the binary stream task.

Per (class, feature) the model keeps single-pass running moments
(count, mean, M2); variance is M2/n floored at ``var_floor`` so constant
features cannot produce infinite densities. Prediction multiplies the class
prior by the per-feature Gaussian densities in log space.
"""

from __future__ import annotations

import numpy as np

from streamguard import kernels

VAR_FLOOR = 1e-9


class GaussianNaiveBayes:
    def __init__(self, n_features: int, var_floor: float = VAR_FLOOR):
        self.n_features = n_features
        self.var_floor = var_floor
        self.class_counts = np.zeros(2)
        self.ns = np.zeros((2, n_features))
        self.means = np.zeros((2, n_features))
        self.m2s = np.zeros((2, n_features))
        # min/max are unused by the model but keep the kernel signature shared
        self._mins = np.full(n_features, np.inf)
        self._maxs = np.full(n_features, -np.inf)

    def learn_one(self, x: np.ndarray, y: int, w: float = 1.0) -> None:
        self.class_counts[y] += w
        kernels.welford_update(
            self.ns[y], self.means[y], self.m2s[y], self._mins, self._maxs, x, w
        )

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        total = self.class_counts.sum()
        if total <= 0:
            return np.array([0.5, 0.5])
        log_post = np.full(2, -np.inf)
        seen = self.class_counts > 0
        log_post[seen] = np.log(self.class_counts[seen] / total)
        loglik = np.zeros(2)
        kernels.gaussian_joint_loglik(
            self.ns, self.means, self.m2s, x, self.var_floor, loglik
        )
        log_post = log_post + loglik
        log_post -= log_post.max()
        p = np.exp(log_post)
        return p / p.sum()

    def predict(self, x: np.ndarray) -> int:
        return int(np.argmax(self.predict_proba(x)))

    def variance(self, y: int) -> np.ndarray:
        """Per-feature population variance under class ``y`` (floored)."""
        n = np.where(self.ns[y] > 0, self.ns[y], 1.0)
        return np.maximum(self.m2s[y] / n, 0.0)
